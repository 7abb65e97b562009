//! Small derivative-free searches shared by the verifiers: golden-section
//! refinement on a sampled interval, lattice zoom for concave maximization
//! and a compass search for box-constrained minimization.

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimum of `f` over a sorted mesh, refined by golden section between the
/// neighbours of the best node when `refine` is set. Ties go to the smallest
/// parameter. The returned value never exceeds the best mesh value.
pub fn mesh_min(mesh: &[f64], refine: bool, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    assert!(!mesh.is_empty());
    let mut best = (mesh[0], f(mesh[0]));
    let mut best_i = 0;
    for (i, &l) in mesh.iter().enumerate().skip(1) {
        let v = f(l);
        if v < best.1 {
            best = (l, v);
            best_i = i;
        }
    }
    if !refine || mesh.len() < 2 || !best.1.is_finite() {
        return best;
    }
    let a = mesh[best_i.saturating_sub(1)];
    let b = mesh[(best_i + 1).min(mesh.len() - 1)];
    let (l, v) = golden_min(&mut f, a, b, 200);
    if v < best.1 {
        (l, v)
    } else {
        best
    }
}

/// Maximum counterpart of [`mesh_min`].
pub fn mesh_max(mesh: &[f64], refine: bool, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let (l, v) = mesh_min(mesh, refine, |t| -f(t));
    (l, -v)
}

/// Options for [`zoom_max`].
#[derive(Debug, Clone, Copy)]
pub struct ZoomOptions {
    /// Nodes per axis of the initial lattice.
    pub initial_nodes: usize,
    /// Half-width, in steps, of each refinement lattice.
    pub half_width: usize,
    /// Spacing reduction factor between levels.
    pub shrink: f64,
    pub levels: usize,
}

impl Default for ZoomOptions {
    fn default() -> Self {
        ZoomOptions {
            initial_nodes: 41,
            half_width: 4,
            shrink: 4.0,
            levels: 18,
        }
    }
}

const MAX_RECENTRES: usize = 64;
const MAX_RESTARTS: usize = 20;

/// Maximize `f` over the box `[lo, hi]`: a full lattice scan followed by
/// successively finer lattices centred on the incumbent. Exact for the
/// lattice and accurate for concave objectives; returns `(argmax, max)`.
pub fn zoom_max(
    f: &mut impl FnMut(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    opts: ZoomOptions,
) -> (Vec<f64>, f64) {
    let d = lo.len();
    let n0 = opts.initial_nodes.max(2);
    let mut h: Vec<f64> = (0..d).map(|a| (hi[a] - lo[a]) / (n0 - 1) as f64).collect();
    let mut best_x = lo.to_vec();
    let mut best_v = f64::NEG_INFINITY;
    let mut x = vec![0.0; d];
    let total = n0.pow(d as u32);
    for flat in 0..total {
        let mut r = flat;
        for a in (0..d).rev() {
            let i = r % n0;
            r /= n0;
            let t = i as f64 / (n0 - 1) as f64;
            x[a] = lo[a] * (1.0 - t) + hi[a] * t;
        }
        let v = f(&x);
        if v > best_v {
            best_v = v;
            best_x.copy_from_slice(&x);
        }
    }
    if !best_v.is_finite() {
        return (best_x, best_v);
    }
    let w = opts.half_width;
    let side = 2 * w + 1;
    for _ in 0..opts.levels {
        for ha in h.iter_mut() {
            *ha /= opts.shrink;
        }
        // re-centre at this spacing while the incumbent moves, so the search
        // can travel along ridges of nonsmooth objectives
        for _ in 0..MAX_RECENTRES {
            let center = best_x.clone();
            for flat in 0..side.pow(d as u32) {
                let mut r = flat;
                for a in (0..d).rev() {
                    let i = (r % side) as f64 - w as f64;
                    r /= side;
                    x[a] = (center[a] + i * h[a]).clamp(lo[a], hi[a]);
                }
                let v = f(&x);
                if v > best_v {
                    best_v = v;
                    best_x.copy_from_slice(&x);
                }
            }
            if best_x == center {
                break;
            }
        }
    }
    (best_x, best_v)
}

/// Maximize a concave `f` over the box `[lo, hi]` by the ellipsoid method.
/// `f` returns the value and a supergradient, or `None` where it has none
/// (treated as infeasible). Bisection in one dimension. Returns the best
/// iterate seen, starting from `(start, f(start))`.
pub fn ellipsoid_max(
    f: &mut impl FnMut(&[f64]) -> (f64, Option<Vec<f64>>),
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    iters: usize,
) -> (Vec<f64>, f64) {
    let n = lo.len();
    let mut best_x = start.to_vec();
    let mut best_v = f(start).0;
    let mut c: Vec<f64> = (0..n).map(|a| 0.5 * (lo[a] + hi[a])).collect();
    if n == 1 {
        let (mut a, mut b) = (lo[0], hi[0]);
        for _ in 0..iters {
            let m = 0.5 * (a + b);
            let (v, g) = f(&[m]);
            if v > best_v {
                best_v = v;
                best_x = vec![m];
            }
            match g {
                Some(g) if g[0] > 0.0 => a = m,
                Some(g) if g[0] < 0.0 => b = m,
                Some(_) => break,
                None => break,
            }
            if b - a <= f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        return (best_x, best_v);
    }
    // shape matrix of the ellipsoid {z : (z-c)' P^-1 (z-c) <= 1}, row-major
    let r2: f64 = (0..n).map(|a| (0.5 * (hi[a] - lo[a])).powi(2)).sum();
    let mut p = vec![0.0; n * n];
    for a in 0..n {
        p[a * n + a] = r2;
    }
    let nf = n as f64;
    let mut restarts = 0;
    for _ in 0..iters {
        // outward normal of the half-space dropped by this cut
        let cut: Vec<f64> = if let Some(a) = (0..n).find(|&a| c[a] < lo[a] || c[a] > hi[a]) {
            let mut e = vec![0.0; n];
            e[a] = if c[a] < lo[a] { -1.0 } else { 1.0 };
            e
        } else {
            let (v, g) = f(&c);
            if v > best_v {
                best_v = v;
                best_x.copy_from_slice(&c);
            }
            match g {
                Some(g) if g.iter().any(|&t| t != 0.0) => g.iter().map(|t| -t).collect(),
                _ => break,
            }
        };
        let pg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| p[i * n + j] * cut[j]).sum()).collect();
        let gpg: f64 = cut.iter().zip(&pg).map(|(a, b)| a * b).sum();
        let scale = (0..n).map(|a| p[a * n + a]).fold(0.0, f64::max).sqrt();
        if scale <= 1e-13 * (1.0 + r2.sqrt()) {
            break;
        }
        if !(gpg > 1e-12 * scale * scale * cut.iter().map(|t| t * t).sum::<f64>()) {
            // the shape matrix has degenerated: restart on a ball about the incumbent
            restarts += 1;
            if restarts > MAX_RESTARTS {
                break;
            }
            c.copy_from_slice(&best_x);
            p.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..n {
                p[a * n + a] = scale * scale;
            }
            continue;
        }
        let b: Vec<f64> = pg.iter().map(|t| t / gpg.sqrt()).collect();
        for i in 0..n {
            c[i] -= b[i] / (nf + 1.0);
        }
        let k = nf * nf / (nf * nf - 1.0);
        let w = 2.0 / (nf + 1.0);
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] = k * (p[i * n + j] - w * b[i] * b[j]);
            }
        }
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (p[i * n + j] + p[j * n + i]);
                p[i * n + j] = m;
                p[j * n + i] = m;
            }
        }
    }
    (best_x, best_v)
}

/// Compass search: axis moves of the current step, halving the step when no
/// move decreases `f`. Iterates are clamped to the box.
pub fn compass_min(
    f: &mut impl FnMut(&[f64]) -> f64,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    initial_step: f64,
    min_step: f64,
    budget: usize,
) -> (Vec<f64>, f64, usize) {
    let d = start.len();
    let mut x: Vec<f64> = start
        .iter()
        .enumerate()
        .map(|(a, &v)| v.clamp(lo[a], hi[a]))
        .collect();
    let mut fx = f(&x);
    let mut step = initial_step;
    let mut iters = 0;
    let mut trial = x.clone();
    while iters < budget && step > min_step {
        iters += 1;
        let mut improved = false;
        'dirs: for a in 0..d {
            for sign in [1.0, -1.0] {
                trial.copy_from_slice(&x);
                trial[a] = (x[a] + sign * step).clamp(lo[a], hi[a]);
                if trial[a] == x[a] {
                    continue;
                }
                let v = f(&trial);
                if v < fx {
                    fx = v;
                    x.copy_from_slice(&trial);
                    improved = true;
                    break 'dirs;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx, iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_min(&mut |t| (t - 0.3).powi(2) + 1.0, -1.0, 2.0, 200);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mesh_min_refines_between_nodes() {
        let mesh: Vec<f64> = (0..11).map(|i| 0.1 + i as f64 * 0.99).collect();
        let (l, v) = mesh_min(&mesh, true, |l| l / 2.0 + 1.0 / (2.0 * l));
        assert_abs_diff_eq!(l, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        let (_, coarse) = mesh_min(&mesh, false, |l| l / 2.0 + 1.0 / (2.0 * l));
        assert!(coarse > v);
    }

    #[test]
    fn zoom_max_on_a_kinked_concave_function() {
        // sup_z <z, y> - max(0.05(|z|^2-1), 5(|z|^2-1)) at y = (0.6, 0.8) is 1
        let y = [0.6, 0.8];
        let mut f = |z: &[f64]| {
            let r2 = z[0] * z[0] + z[1] * z[1];
            z[0] * y[0] + z[1] * y[1] - (0.05 * (r2 - 1.0)).max(5.0 * (r2 - 1.0))
        };
        let (_, v) = zoom_max(&mut f, &[-3.0, -3.0], &[3.0, 3.0], ZoomOptions::default());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn compass_reaches_box_interior_minimum() {
        let mut f = |x: &[f64]| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2);
        let (x, v, _) = compass_min(&mut f, &[0.0, 0.0], &[-4.0, -4.0], &[4.0, 4.0], 1.0, 1e-12, 5000);
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], -1.0, epsilon = 1e-9);
        assert!(v < 1e-15);
    }
    #[test]
    fn ellipsoid_finds_the_top_of_a_curved_ridge() {
        // min of two concave quadratics meeting on the unit circle
        let y = [3.0, 1.0];
        let mut f = |z: &[f64]| {
            let r2 = z[0] * z[0] + z[1] * z[1];
            let l = if r2 > 1.0 { 10.0 } else { 0.1 };
            let v = z[0] * y[0] + z[1] * y[1] - 0.5 * l * (r2 - 1.0);
            (v, Some(vec![y[0] - l * z[0], y[1] - l * z[1]]))
        };
        let (z, v) = ellipsoid_max(&mut f, &[0.0, 0.0], &[-3.0, -3.0], &[3.0, 3.0], 400);
        assert!((v - 10f64.sqrt()).abs() < 1e-9, "{v}");
        assert!((z[0] - 3.0 / 10f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn ellipsoid_bisects_in_one_dimension() {
        let mut f = |z: &[f64]| (-(z[0] - 0.3).abs(), Some(vec![if z[0] < 0.3 { 1.0 } else { -1.0 }]));
        let (z, _) = ellipsoid_max(&mut f, &[2.0], &[-1.0], &[3.0], 200);
        assert!((z[0] - 0.3).abs() < 1e-12);
    }
}
