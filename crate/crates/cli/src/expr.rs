//! User expressions in `x` (and `y`), evaluated with `evalexpr`.
//!
//! Integer literals are read as reals so that `1/2` means one half. The
//! constant `inf` writes indicators, e.g. `if(abs(x) <= 1, 0, inf)`.

use anyhow::{bail, Result};
use bipokit_core::ExtReal;
use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, EvalexprError, Function,
    HashMapContext, Node, Value,
};

#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    node: Node,
}

fn unary(f: fn(f64) -> f64) -> Function {
    Function::new(move |a: &Value| Ok(Value::Float(f(a.as_number()?))))
}

fn pos(v: f64) -> f64 {
    v.max(0.0)
}

impl Expr {
    /// Parse `source`, allowing only the variables in `vars`.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self> {
        let node = build_operator_tree(&floatify(source)).map_err(|e| anyhow::anyhow!("expression {source:?}: {e}"))?;
        for id in node.iter_variable_identifiers() {
            if id != "inf" && !vars.contains(&id) {
                bail!("expression {source:?} uses unknown variable {id:?} (allowed: {})", vars.join(", "));
            }
        }
        let e = Expr {
            source: source.to_owned(),
            node,
        };
        let probe: Vec<(&str, f64)> = vars.iter().map(|&v| (v, 0.25)).collect();
        e.eval(&probe)?;
        Ok(e)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, vars: &[(&str, f64)]) -> Result<f64> {
        let mut ctx = HashMapContext::new();
        let set = |ctx: &mut HashMapContext| -> std::result::Result<(), EvalexprError> {
            ctx.set_value("inf".into(), Value::Float(f64::INFINITY))?;
            for &(k, v) in vars {
                ctx.set_value(k.into(), Value::Float(v))?;
            }
            ctx.set_function("abs".into(), unary(f64::abs))?;
            ctx.set_function("sqrt".into(), unary(f64::sqrt))?;
            ctx.set_function("exp".into(), unary(f64::exp))?;
            ctx.set_function("ln".into(), unary(f64::ln))?;
            ctx.set_function("pos".into(), unary(pos))?;
            Ok(())
        };
        set(&mut ctx).map_err(|e| anyhow::anyhow!("{e}"))?;
        self.node
            .eval_number_with_context(&ctx)
            .map_err(|e| anyhow::anyhow!("evaluating {:?}: {e}", self.source))
    }

    /// Value as an extended real: NaN and evaluation errors read as `+∞`
    /// (outside the domain), `−∞` as the most negative finite real so
    /// that inequality checks fail visibly.
    pub fn eval_ext(&self, vars: &[(&str, f64)]) -> ExtReal {
        match self.eval(vars) {
            Ok(v) if v.is_nan() => ExtReal::INFINITY,
            Ok(v) if v == f64::NEG_INFINITY => ExtReal::new(f64::MIN),
            Ok(v) => ExtReal::new(v),
            Err(_) => ExtReal::INFINITY,
        }
    }
}

/// Append `.0` to integer literals.
fn floatify(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let starts_number = c.is_ascii_digit()
            && (i == 0 || !(chars[i - 1].is_alphanumeric() || chars[i - 1] == '_' || chars[i - 1] == '.'));
        if !starts_number {
            out.push(c);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        out.extend(&chars[start..i]);
        let real = i < chars.len() && matches!(chars[i], '.' | 'e' | 'E');
        if !real {
            out.push_str(".0");
        }
    }
    out
}
