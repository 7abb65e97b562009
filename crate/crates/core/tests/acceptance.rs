//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::Instant;

use bipokit_core::bipotential::{
    check_axioms, check_cyclically_monotone, check_monotone, check_strong, max_of_separable, separable,
    sum_of_squares, Conjugation, ProbeGrid,
};
use bipokit_core::covers::{
    build_from_cover, fan_convexity_check, minimax_check, xbar_conjugate_at, Cover, FanOptions, LambdaSet,
};
use bipokit_core::fitzpatrick::{
    fitzpatrick_fn, grid_tolerance, lagrangian_operators, maximal_monotone_test, proximal_average, selfdual_check,
    MonotoneVerdict,
};
use bipokit_core::laws::{
    cauchy_bipotential, coaxial_operator, coulomb_bipotential, coulomb_graph, coulomb_inclusion_check,
    dp_bipotential, dp_operators, hill_bipotential, iso_operator, random_symmetric, random_unit_deviator,
    vonmises_bipotential, vonmises_operator, DpParams, Sampling,
};
use bipokit_core::point::norm;
use bipokit_core::solver::{
    bifunctional_0d, contact_point_solve, material_point_history, DrivingKind, LoadHistory, SolveOptions,
};
use bipokit_core::symmat::eig_sym;
use bipokit_core::{Bipotential, ConvexFn, ExtReal, GraphSample, Grid, GridFn, Point, Space, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("fenchel engine", c1_fenchel),
        ("axiom suite", c2_axioms),
        ("fan/hill inequality", c3_hill),
        ("law graphs", c4_graphs),
        ("non-monotonicity witnesses", c5_monotone),
        ("fitzpatrick", c6_fitzpatrick),
        ("cover reconstruction", c7_covers),
        ("max of separable", c8_maxsep),
        ("solver", c9_solver),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = run();
        all &= ok;
        println!(
            "criterion {} [{name}]: {} ({detail}; {:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn c1_fenchel() -> Outcome {
    let primal = Grid::uniform(-5.0, 5.0, 1001).unwrap();
    let h = primal.spacing(0);
    let dual = Grid::uniform(-12.0, 12.0, 2401).unwrap();
    let fns: [(&str, fn(f64) -> ExtReal); 4] = [
        ("x^2/2", |x| ExtReal::new(0.5 * x * x)),
        ("|x|", |x| ExtReal::new(x.abs())),
        ("chi[-1,1]", |x| ExtReal::indicator(x.abs() <= 1.0 + 1e-12)),
        ("max(0,x)^2", |x| ExtReal::new(x.max(0.0).powi(2))),
    ];
    let mut ok = true;
    let mut worst = 0.0_f64;
    let mut worst_fy = f64::INFINITY;
    let mut notes = Vec::new();
    for (name, f) in fns {
        let phi = GridFn::from_fn(primal.clone(), |x| f(x[0]));
        let conj = phi.conjugate(&dual).unwrap();
        let raw = conj.function.clone();
        let star = conj.flagged_as_infinite();
        let bi = star.conjugate(&primal).unwrap().flagged_as_infinite();
        let mut err = 0.0_f64;
        for k in 0..primal.len() {
            let x = primal.node(k)[0];
            if x.abs() > 5.0 * 2.0 / 3.0 {
                continue;
            }
            let (a, b) = (bi.value_at(k), phi.value_at(k));
            let e = match (a.finite_value(), b.finite_value()) {
                (Some(a), Some(b)) => (a - b).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            };
            err = err.max(e);
        }
        let mut fy = f64::INFINITY;
        for i in 0..primal.len() {
            let Some(fx) = phi.value_at(i).finite_value() else { continue };
            let x = primal.node(i)[0];
            for j in 0..dual.len() {
                if let Some(fs) = raw.value_at(j).finite_value() {
                    fy = fy.min(fx + fs - x * dual.node(j)[0]);
                }
            }
        }
        if err > 5.0 * h || fy < -1e-9 {
            ok = false;
            notes.push(name);
        }
        worst = worst.max(err);
        worst_fy = worst_fy.min(fy);
    }
    (
        ok,
        format!("max |phi** - phi| = {worst:.2e} (limit {:.2e}), min FY gap = {worst_fy:.2e}{}", 5.0 * h, failed(&notes)),
    )
}

fn failed(names: &[&str]) -> String {
    if names.is_empty() {
        String::new()
    } else {
        format!(", failing: {}", names.join(", "))
    }
}

fn sym(rows: [[f64; 3]; 3]) -> Point {
    SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
        .unwrap()
        .to_point()
}

fn axioms_pass<B: Bipotential + ?Sized>(b: &B, xs: &[Point], ys: &[Point], probes: &ProbeGrid) -> bool {
    check_axioms(b, xs, ys, probes, 1e-8).map(|r| r.pass).unwrap_or(false)
}

fn c2_axioms() -> Outcome {
    let mut notes = Vec::new();
    let line = ProbeGrid::symmetric(Grid::uniform(-3.0, 3.0, 61).unwrap());
    let scalars: Vec<Point> = [-1.0, 0.0, 0.5, 1.0].iter().map(|&v| Point::scalar(v)).collect();

    let sep = separable(Space::Euclidean(1), ConvexFn::half_square(1), Conjugation::Given(ConvexFn::half_square(1))).unwrap();
    if !axioms_pass(&sep, &scalars, &scalars, &line) {
        notes.push("separable");
    }

    let plane = ProbeGrid::symmetric(Grid::cube(2, -2.0, 2.0, 21).unwrap());
    let pts: Vec<Point> = [[0.0, 0.0], [1.0, 0.5], [-0.4, 1.2]].iter().map(|p| Point::euclid(p.to_vec())).collect();
    if !axioms_pass(&cauchy_bipotential(2), &pts, &pts, &plane) {
        notes.push("cauchy");
    }

    let sym6 = ProbeGrid::symmetric(Grid::cube(6, -1.0, 1.0, 5).unwrap());
    let mats = vec![
        SymMatrix::zeros(3).to_point(),
        sym([[1.0, 0.5, 0.0], [0.5, -0.5, 0.2], [0.0, 0.2, 0.3]]),
        sym([[-0.5, 0.0, 0.4], [0.0, 0.5, 0.0], [0.4, 0.0, 0.0]]),
    ];
    if !axioms_pass(&hill_bipotential(3), &mats, &mats, &sym6) {
        notes.push("hill");
    }

    let contact = ProbeGrid::symmetric(Grid::cube(3, -2.0, 2.0, 21).unwrap());
    for mu in [0.2, 0.5, 1.0] {
        let xs = vec![
            Point::contact(-1.0, [0.3, 0.0]),
            Point::contact(0.0, [0.0, 0.0]),
            Point::contact(0.0, [1.0, -0.5]),
        ];
        let ys = vec![
            Point::contact(0.0, [0.0, 0.0]),
            Point::contact(1.0, [0.5 * mu, 0.0]),
            Point::contact(1.0, [mu, 0.0]),
        ];
        if !axioms_pass(&coulomb_bipotential(mu).unwrap(), &xs, &ys, &contact) {
            notes.push(match mu {
                m if m < 0.3 => "coulomb 0.2",
                m if m < 0.7 => "coulomb 0.5",
                _ => "coulomb 1",
            });
        }
    }

    for (frac, name) in [(0.0, "dp theta=0"), (0.3, "dp theta=0.3phi")] {
        let p = DpParams::new(FRAC_PI_4, 1.0, frac * FRAC_PI_4).unwrap();
        let b = dp_bipotential(&p);
        let unit = SymMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let unit = unit.scaled(1.0 / unit.norm());
        // a strain on the ray x_h = r‖x_d‖ tanθ, with x_h the trace
        let xh = p.r() * 0.5 * (frac * FRAC_PI_4).tan();
        let xs = vec![
            SymMatrix::zeros(3).to_point(),
            SymMatrix::identity(3).scaled(0.5).to_point(),
            unit.scaled(0.5).add(&SymMatrix::identity(3).scaled(xh / 3.0)).to_point(),
        ];
        let ys = vec![
            SymMatrix::zeros(3).to_point(),
            p.vertex().to_point(),
            p.ray_point(&unit, 0.5).to_point(),
        ];
        if !axioms_pass(&b, &xs, &ys, &sym6) {
            notes.push(name);
        }
    }

    let sq = check_axioms(&sum_of_squares(), &scalars, &scalars, &line, 1e-8).unwrap();
    let sq_caught = !sq.pass && sq.first_witness().is_some();
    if !sq_caught {
        notes.push("x^2+y^2 not rejected");
    }
    (notes.is_empty(), format!("10 bipotentials checked, x^2+y^2 rejected with witness: {sq_caught}{}", failed(&notes)))
}

fn permutation_oracle(x: &SymMatrix, y: &SymMatrix) -> f64 {
    let ey = eig_sym(y).unwrap();
    let ex = eig_sym(x).unwrap();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| {
            let vals: Vec<f64> = p.iter().map(|&i| ey.values[i]).collect();
            SymMatrix::from_spectral(&vals, &ex.vectors).inner(x)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn c3_hill() -> Outcome {
    let h = hill_bipotential(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut min_gap = f64::INFINITY;
    let mut oracle_err = 0.0_f64;
    let mut coaxial_gap = 0.0_f64;
    for _ in 0..100 {
        let x = random_symmetric(3, &mut rng);
        let y = random_symmetric(3, &mut rng);
        let b = h.value(&x, &y);
        min_gap = min_gap.min(b - x.inner(&y));
        oracle_err = oracle_err.max((permutation_oracle(&x, &y) - b).abs());

        let q = eig_sym(&random_symmetric(3, &mut rng)).unwrap().vectors;
        let mut a: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut c: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        a.sort_by(|u, v| v.total_cmp(u));
        c.sort_by(|u, v| v.total_cmp(u));
        let (xa, yc) = (SymMatrix::from_spectral(&a, &q), SymMatrix::from_spectral(&c, &q));
        coaxial_gap = coaxial_gap.max((h.value(&xa, &yc) - xa.inner(&yc)).abs());
    }
    let ok = min_gap >= -1e-9 && oracle_err <= 1e-9 && coaxial_gap <= 1e-9;
    (
        ok,
        format!("min gap {min_gap:.2e}, oracle error {oracle_err:.2e}, coaxial gap {coaxial_gap:.2e}"),
    )
}

fn max_gap<B: Bipotential + ?Sized>(b: &B, g: &GraphSample) -> f64 {
    g.pairs()
        .iter()
        .map(|(x, y)| b.gap(x, y).unwrap().get().abs())
        .fold(0.0, f64::max)
}

fn c4_graphs() -> Outcome {
    let s = Sampling::default();
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    let mut record = |gap: f64, n: usize| {
        worst = worst.max(gap);
        pairs += n;
    };
    for mu in [0.2, 0.5, 1.0] {
        let g = coulomb_graph(mu, &s).unwrap();
        record(max_gap(&coulomb_bipotential(mu).unwrap(), &g), g.len());
    }
    let g = vonmises_operator(2.0, s.clone()).unwrap().graph().unwrap();
    record(max_gap(&vonmises_bipotential(2.0).unwrap(), &g), g.len());
    for frac in [0.0, 0.3] {
        let p = DpParams::new(FRAC_PI_4, 1.0, frac * FRAC_PI_4).unwrap();
        let (t_dp, t_na) = dp_operators(&p, s.clone()).unwrap();
        let g = t_dp.graph().unwrap();
        record(max_gap(&dp_bipotential(&p.associated()), &g), g.len());
        let g = t_na.graph().unwrap();
        record(max_gap(&dp_bipotential(&p), &g), g.len());
    }
    let g = iso_operator(3, s.clone()).graph().unwrap();
    record(max_gap(&cauchy_bipotential(3), &g), g.len());

    // inclusion form against gap form, on the graph and on random pairs
    let mut disagreements = 0;
    let mut compared = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for mu in [0.2, 0.5, 1.0] {
        let b = coulomb_bipotential(mu).unwrap();
        let mut cases: Vec<(Vec<f64>, Vec<f64>)> = coulomb_graph(mu, &s)
            .unwrap()
            .pairs()
            .iter()
            .map(|(x, y)| (x.coords().to_vec(), y.coords().to_vec()))
            .collect();
        for _ in 0..2000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            cases.push((x, y));
        }
        for (x, y) in &cases {
            let by_gap = b.gap_coords(x, y).get() <= 1e-8;
            compared += 1;
            if by_gap != coulomb_inclusion_check(mu, x, y, 1e-8) {
                disagreements += 1;
            }
        }
    }
    let ok = worst <= 1e-8 && disagreements == 0;
    (
        ok,
        format!("{pairs} emitted pairs, max gap {worst:.2e}; coulomb inclusion vs gap: {disagreements}/{compared} disagreements"),
    )
}

fn c5_monotone() -> Outcome {
    let s = Sampling::default();
    let cauchy = check_monotone(&iso_operator(2, s.clone()).graph().unwrap());
    let hill = check_monotone(&coaxial_operator(3, s.clone()).graph().unwrap());
    let coulomb = check_monotone(&coulomb_graph(0.5, &s).unwrap());
    let found = |r: &(bool, Option<_>)| !r.0 && r.1.is_some();
    let vm = vonmises_operator(2.0, s).unwrap().graph().unwrap();
    let (vm_ok, _) = check_cyclically_monotone(&vm, 3).unwrap();
    let ok = found(&cauchy) && found(&hill) && found(&coulomb) && vm_ok;
    (
        ok,
        format!(
            "witnesses: cauchy {}, hill {}, coulomb {}; vonmises cyclically monotone (m=3): {vm_ok}",
            found(&cauchy),
            found(&hill),
            found(&coulomb)
        ),
    )
}

fn c6_fitzpatrick() -> Outcome {
    let g = Grid::cube(2, -2.0, 2.0, 41).unwrap();
    let gt = grid_tolerance(&g);
    let ident: Vec<(f64, f64)> = Grid::uniform(-3.0, 3.0, 601).unwrap().axis(0).iter().map(|&a| (a, a)).collect();
    let m = GraphSample::scalar_pairs("identity", &ident);
    let f = fitzpatrick_fn(&m).unwrap();
    let fit_err = g
        .points()
        .iter()
        .map(|z| (f.eval(z[0], z[1]).get() - (z[0] + z[1]).powi(2) / 4.0).abs())
        .fold(0.0, f64::max);

    let mut abs_pts = Vec::new();
    for t in Grid::uniform(0.01, 3.0, 300).unwrap().axis(0) {
        abs_pts.push((t, 1.0));
        abs_pts.push((-t, -1.0));
    }
    for s in Grid::uniform(-1.0, 1.0, 201).unwrap().axis(0) {
        abs_pts.push((0.0, s));
    }
    let abs = maximal_monotone_test(&GraphSample::scalar_pairs("abs", &abs_pts), &g, 1e-3).unwrap();
    let abs_ok = abs.verdict == MonotoneVerdict::ConsistentWithMaximalMonotone;

    let mut planted = ident.clone();
    planted.push((1.0, -1.0));
    let bad = maximal_monotone_test(&GraphSample::scalar_pairs("planted", &planted), &g, 1e-3).unwrap();
    let planted_ok = bad.verdict == MonotoneVerdict::NotMonotone && bad.monotone_witness.is_some();

    let p = proximal_average(&f, &g).unwrap();
    let sd = selfdual_check(&p, &g, 10.0 * gt).unwrap();
    let mut contained = true;
    for &(x, y) in ident.iter().filter(|(x, _)| x.abs() <= 1.0) {
        let k = g.nearest(0, x);
        let xn = g.coord(0, k);
        if (xn - x).abs() > 1e-9 {
            continue;
        }
        let ops = lagrangian_operators(&p, xn, &g, 10.0 * gt).unwrap();
        if !ops.bar.iter().any(|&b| (b - y).abs() <= 1e-9) {
            contained = false;
        }
    }
    let ok = fit_err <= gt && abs_ok && planted_ok && sd.selfdual && sd.worst_gap <= 10.0 * gt && contained;
    (
        ok,
        format!(
            "identity fit {fit_err:.2e} (tol {gt:.0e}), |x| verdict {:?}, planted pair detected {planted_ok}, prox-average selfdual gap {:.2e}, samples in bar-partial {contained}",
            abs.verdict, sd.worst_gap
        ),
    )
}

fn c7_covers() -> Outcome {
    let lambda = LambdaSet::interval(0.1, 10.0, 101).unwrap();
    let cover = Cover::quadratic_scaling(2, lambda.clone()).unwrap();
    let b = build_from_cover(cover.clone()).unwrap();
    let fine = build_from_cover(Cover::quadratic_scaling(2, lambda.with_nodes(201).unwrap()).unwrap()).unwrap();
    let region = Grid::cube(2, -3.0, 3.0, 41).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut probes = Vec::new();
    for i in 0..16 {
        let r = rng.gen_range(0.5..2.0);
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let x = vec![r * a.cos(), r * a.sin()];
        // most probes inside the ratio range, a few outside on either side
        let ratio = match i % 4 {
            0 => rng.gen_range(0.01..0.1),
            1 => rng.gen_range(10.0..15.0),
            _ => rng.gen_range(0.1..10.0),
        };
        let c = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = vec![ratio * r * c.cos(), ratio * r * c.sin()];
        probes.push((x, y, ratio));
    }
    let xs: Vec<Vec<f64>> = probes.iter().take(3).map(|p| p.0.clone()).collect();
    let ys: Vec<Vec<f64>> = probes.iter().take(3).map(|p| p.1.clone()).collect();
    let fan = fan_convexity_check(&cover, &xs, &ys, &Grid::cube(2, -2.0, 2.0, 9).unwrap(), &FanOptions::default());

    let mut cauchy_err = 0.0_f64;
    let mut oracle = 0.0_f64;
    let mut minimax = 0.0_f64;
    let mut refine = 0.0_f64;
    let mut edge = false;
    for (x, y, ratio) in &probes {
        let v = b.eval_coords(x, y).get();
        if (0.1..=10.0).contains(ratio) {
            cauchy_err = cauchy_err.max((v - norm(x) * norm(y)).abs());
        }
        let (xs_, e1) = xbar_conjugate_at(&cover, x, y, &region).unwrap();
        oracle = oracle.max((v - xs_.get()).abs());
        let mm = minimax_check(&cover, x, y, &region).unwrap();
        minimax = minimax.max(mm.gap);
        refine = refine.max((v - fine.eval_coords(x, y).get()).abs());
        edge |= e1 || mm.edge_limited;
    }
    let ok = fan.pass && cauchy_err <= 1e-6 && oracle <= 1e-6 && minimax <= 1e-6 && refine <= 1e-6 && !edge;
    (
        ok,
        format!(
            "fan check {} ({} instances, {} counterpart probes); cauchy error {cauchy_err:.1e}, |b - xbar*| {oracle:.1e}, minimax gap {minimax:.1e}, 101->201 change {refine:.1e}",
            if fan.pass { "pass" } else { "fail" },
            fan.instances,
            fan.counterpart_probes
        ),
    )
}

fn c8_maxsep() -> Outcome {
    let primal = Grid::uniform(-5.0, 5.0, 201).unwrap();
    let dual = Grid::uniform(-3.0, 3.0, 121).unwrap();
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let slices: Vec<Point> = [-1.0, 0.0, 0.5, 1.0].iter().map(|&t| Point::scalar(t)).collect();
    let probes = ProbeGrid::symmetric(Grid::uniform(-2.0, 2.0, 41).unwrap());
    let fixtures = [
        ("quadratics", ConvexFn::half_square(1), ConvexFn::half_square(1), true),
        ("ray indicators", ConvexFn::nonpositive_ray(), ConvexFn::nonnegative_ray(), true),
        ("point indicator + quadratic", ConvexFn::zero_indicator(1), ConvexFn::half_square(1), false),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f1, f2, expect) in fixtures {
        let (b, rep) = max_of_separable(Space::Euclidean(1), f1, f2, &primal, &dual, &lambdas, 1e-6).unwrap();
        let strong = check_strong(&b, &slices, &slices, &probes, 1e-8).unwrap().pass;
        ok &= rep.pass == strong && rep.pass == expect;
        parts.push(format!("{name}: conditions {} / strong {}", rep.pass, strong));
    }
    (ok, parts.join(", "))
}

fn random_point(space: Space, rng: &mut ChaCha8Rng) -> Point {
    match space {
        Space::Traceless(3) => random_unit_deviator(rng)
            .scaled(rng.gen_range(0.0..3.0))
            .to_traceless_point()
            .unwrap(),
        Space::Symmetric(k) => random_symmetric(k, rng).to_point(),
        s => Point::new(s, (0..s.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap(),
    }
}

fn c9_solver() -> Outcome {
    let opts = SolveOptions::default();
    let mu = 0.5;
    let coulomb = coulomb_bipotential(mu).unwrap();
    let rows = [
        (0.0, [-1.0, 0.2, 0.0]),
        (1.0, [0.0, 0.0, 0.0]),
        (2.0, [0.0, 0.5, 0.0]),
        (3.0, [0.0, 1.0, -1.0]),
    ];
    let h = LoadHistory::new(
        DrivingKind::Velocity,
        rows.iter().map(|&(t, v)| (t, Point::contact(v[0], [v[1], v[2]]))).collect(),
    )
    .unwrap();
    let pre = Point::contact(2.0, [0.2, 0.0]);
    let tr = contact_point_solve(&coulomb, &h, Some(&pre), &opts).unwrap();
    let labels: Vec<String> = tr.steps.iter().filter_map(|s| s.branch.clone()).collect();
    let labels_ok = tr.is_complete() && labels == ["separation", "sticking", "sliding", "sliding"];
    let mut slide_err = 0.0_f64;
    for s in tr.steps.iter().filter(|s| s.branch.as_deref() == Some("sliding")) {
        let xt = norm(&s.x[1..]);
        for k in 1..3 {
            slide_err = slide_err.max((s.y[k] - mu * s.y[0] * s.x[k] / xt).abs());
        }
    }
    let slide_ok = slide_err <= 1e-7 && tr.steps.iter().filter(|s| s.branch.as_deref() == Some("sliding")).all(|s| s.y[0] > 0.0);

    let c = 2.0;
    let vm = vonmises_bipotential(c).unwrap();
    let d = SymMatrix::from_rows(&[vec![1.0, 0.3, 0.0], vec![0.3, -0.4, 0.0], vec![0.0, 0.0, -0.6]]).unwrap().deviatoric();
    let rate = d.scaled(0.1 / d.norm()).to_traceless_point().unwrap();
    let h = LoadHistory::new(DrivingKind::StrainRate, (0..20).map(|i| (0.1 * i as f64, rate.clone())).collect()).unwrap();
    let vt = material_point_history(&vm, &h, None, &opts).unwrap();
    let plateau = vt.steps.iter().skip(1).map(|s| (norm(&s.y) - c).abs()).fold(0.0, f64::max);
    let trace_gap = tr.max_gap().max(vt.max_gap());

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let laws: Vec<(&str, Box<dyn Bipotential>)> = vec![
        ("coulomb", Box::new(coulomb_bipotential(mu).unwrap())),
        ("vonmises", Box::new(vonmises_bipotential(c).unwrap())),
        ("drucker-prager", Box::new(dp_bipotential(&DpParams::new(FRAC_PI_4, 1.0, 0.3 * FRAC_PI_4).unwrap()))),
        ("cauchy", Box::new(cauchy_bipotential(3))),
        ("hill", Box::new(hill_bipotential(3))),
    ];
    let mut min_b = f64::INFINITY;
    for (_, b) in &laws {
        for _ in 0..10_000 {
            let v = random_point(b.primal_space(), &mut rng);
            let tau = random_point(b.dual_space(), &mut rng);
            let val = bifunctional_0d(b.as_ref(), &v, &tau).unwrap();
            if let Some(x) = val.finite_value() {
                min_b = min_b.min(x);
            }
        }
    }
    let ok = labels_ok && slide_ok && plateau <= 1e-7 && trace_gap <= 1e-7 && min_b >= -1e-9;
    (
        ok,
        format!(
            "labels {labels:?}, sliding y_t error {slide_err:.1e}, vonmises | |y| - c | {plateau:.1e}, max trace gap {trace_gap:.1e}, min bifunctional {min_b:.1e} over 5 x 10^4 probes"
        ),
    )
}

