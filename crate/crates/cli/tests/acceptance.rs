//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! The finite-element criteria take a few minutes in the test profile.

use std::time::Instant;

use torsion_cli::commands::{cmd_classify, cmd_sweep, SweepArgs, CLASSIFY_DEFAULTS};
use torsion_cli::config::{CommonArgs, ConstraintArg, RunConfig};
use torsion_core::analytic::{mode_ratio, quadratic_form};
use torsion_core::fem2d::{estimate_q, FemEstimate, FemOptions};
use torsion_core::radial::{observed_order, richardson_energy, solve_radial};
use torsion_core::*;

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn line(o: &Outcome) {
    let mark = if o.pass { "PASS" } else { "FAIL" };
    println!(
        "[{mark}] criterion {:<3} {:<42} {}",
        o.id, o.title, o.detail
    );
}

fn radial_agreement() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in [2, 3] {
        for r in [0.3, 0.5, 0.7] {
            for rho in [0.5, 2.0] {
                let g = BallGeometry::new(n, r).unwrap();
                let m = Medium::from_ratio(rho).unwrap();
                let exact = StressProfile::new(g, m);
                let sol = solve_radial(&g, &m, 4096).unwrap();
                worst = worst.max(sol.max_error(|x| exact.value(x)) / exact.value(0.0));
                let p = observed_order(&g, &m, 2048).unwrap();
                pmin = pmin.min(p);
                pmax = pmax.max(p);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: "1",
        title: "radial solver vs stress function",
        pass: worst <= 1e-6 && pmin >= 1.8 && pmax <= 2.2 && secs <= 10.0,
        detail: format!("max rel err {worst:.2e} (<= 1e-6), order {pmin:.3}..{pmax:.3} (2 +- 0.2), {secs:.2} s (<= 10 s)"),
    }
}

fn energy_agreement() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [2, 3] {
        for r in [0.3, 0.5, 0.7] {
            for rho in [0.5, 2.0] {
                let g = BallGeometry::new(n, r).unwrap();
                let m = Medium::from_ratio(rho).unwrap();
                let e = richardson_energy(&g, &m, 4096).unwrap();
                let exact = torsional_rigidity_concentric(&g, &m);
                worst = worst.max((e - exact).abs() / exact);
            }
        }
    }
    let g = BallGeometry::new(2, 0.5).unwrap();
    let one = Medium::new(1.0, 1.0).unwrap();
    let pi8 = std::f64::consts::PI / 8.0;
    let disk = (torsional_rigidity_concentric(&g, &one) - pi8).abs() / pi8;
    let disk_num = (richardson_energy(&g, &one, 4096).unwrap() - pi8).abs() / pi8;
    Outcome {
        id: "2",
        title: "rigidity closed form vs quadrature",
        pass: worst <= 1e-8 && disk <= 1e-8 && disk_num <= 1e-8,
        detail: format!(
            "max rel err {worst:.2e} (<= 1e-8), disk pi/8: closed {disk:.1e}, numerical {disk_num:.1e}"
        ),
    }
}

fn analytic_properties() -> Outcome {
    let start = Instant::now();
    let mut tuples = 0usize;
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |what: &str, n: u32, r: f64, rho: f64| {
        if failures.len() < 5 {
            failures.push(format!("{what} at N={n} R={r} rho={rho}"));
        }
    };
    let radii: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let rhos: Vec<f64> = (0..20)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0))
        .collect();
    for n in 2..=6u32 {
        for &r in &radii {
            let g = BallGeometry::new(n, r).unwrap();
            for &rho in &rhos {
                tuples += 1;
                let m = Medium::from_ratio(rho).unwrap();
                let q = |c, k: f64| quadratic_form(&g, &m, c, k).unwrap().value;
                let mut prev = q(Constraint::Volume, 1.0);
                for i in 1..=396 {
                    let cur = q(Constraint::Volume, 1.0 + 0.25 * i as f64);
                    if cur >= prev || cur.is_nan() {
                        fail("monotonicity", n, r, rho);
                        break;
                    }
                    prev = cur;
                }
                let q1 = q(Constraint::Volume, 1.0);
                if q1.signum() != (1.0 - rho).signum() {
                    fail("sign of Q(1)", n, r, rho);
                }
                if (q(Constraint::Perimeter, 1.0) - q1).abs() > 1e-12 * q1.abs() {
                    fail("Q~(1) = Q(1)", n, r, rho);
                }
                for k in 1..=100u32 {
                    let closed = b_coefficient(&g, &m, k as f64).unwrap();
                    let solved = solve_mode_coefficients(&g, &m, k).unwrap().b;
                    if (closed - solved).abs() > 1e-12 * closed.abs() {
                        fail("B_k closed form vs solve", n, r, rho);
                    }
                    if mode_ratio(&g, &m, k as f64)
                        .unwrap()
                        .denominator
                        .partial_cmp(&0.0)
                        != Some(std::cmp::Ordering::Less)
                    {
                        fail("negative denominator", n, r, rho);
                    }
                }
            }
            let one = Medium::new(1.3, 1.3).unwrap();
            for k in 1..=100 {
                for c in [Constraint::Volume, Constraint::Perimeter] {
                    if quadratic_form(&g, &one, c, k as f64).unwrap().value != 0.0 {
                        fail("zero form at rho = 1", n, r, 1.0);
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && tuples >= 1000 && secs <= 5.0;
    Outcome {
        id: "3",
        title: "analytic property suite",
        pass,
        detail: if failures.is_empty() {
            format!("{tuples} tuples (>= 1000), {secs:.2} s (<= 5 s)")
        } else {
            format!(
                "{tuples} tuples, {secs:.2} s, violations: {}",
                failures.join("; ")
            )
        },
    }
}

struct FemCase {
    sigma: (f64, f64),
    k: u32,
    constraint: Constraint,
    estimate: FemEstimate,
    seconds: f64,
}

fn run_fem(sigma: (f64, f64), k: u32, constraint: Constraint) -> FemCase {
    let g = BallGeometry::new(2, 0.5).unwrap();
    let m = Medium::new(sigma.0, sigma.1).unwrap();
    let start = Instant::now();
    let estimate = estimate_q(&g, &m, k, constraint, &FemOptions::default())
        .unwrap_or_else(|e| panic!("FEM run ({sigma:?}, k={k}, {constraint}) failed: {e}"));
    let seconds = start.elapsed().as_secs_f64();
    eprintln!(
        "    fem sigma={sigma:?} k={k} {constraint}: c2 = {:.6e}, Q = {:.6e}, rel err {:.2e}, {seconds:.1} s",
        estimate.q_estimate, estimate.q_analytic, estimate.rel_error
    );
    FemCase {
        sigma,
        k,
        constraint,
        estimate,
        seconds,
    }
}

fn describe(c: &FemCase) -> String {
    format!(
        "({},{}) k={} {:.1e}",
        c.sigma.0, c.sigma.1, c.k, c.estimate.rel_error
    )
}

fn fem_agreement(cases: &[FemCase], id: &'static str, title: &'static str, tol: f64) -> Outcome {
    let worst = cases
        .iter()
        .map(|c| c.estimate.rel_error)
        .fold(0.0, f64::max);
    let slowest = cases.iter().map(|c| c.seconds).fold(0.0, f64::max);
    let signs = cases
        .iter()
        .all(|c| c.estimate.q_estimate.signum() == c.estimate.q_analytic.signum());
    Outcome {
        id,
        title,
        pass: worst <= tol && signs && slowest <= 300.0,
        detail: format!(
            "rel err {} (<= {tol}), slowest case {slowest:.0} s (<= 300 s)",
            cases.iter().map(describe).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn pinned_first_mode(cases: &[FemCase]) -> Outcome {
    const PINNED: f64 = -1.0 / 13.0;
    let g = BallGeometry::new(2, 0.5).unwrap();
    let m = Medium::new(2.0, 1.0).unwrap();
    let closed = q_first_mode(&g, &m);
    let fem = cases
        .iter()
        .find(|c| c.sigma == (2.0, 1.0) && c.k == 1 && c.constraint == Constraint::Volume)
        .map(|c| c.estimate.q_estimate)
        .expect("k = 1 run present");
    let rel = (fem - PINNED).abs() / PINNED.abs();
    Outcome {
        id: "4b",
        title: "pinned Q(1) = -1/13 for (2,1)",
        pass: rel <= 0.10 && (closed - PINNED).abs() <= 1e-12,
        detail: format!(
            "closed form {closed:.12} (= -1/11), fem {fem:.9}, fem vs -1/13 rel err {rel:.3} (<= 0.1)"
        ),
    }
}

fn first_order_criticality(cases: &[FemCase]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut ok = true;
    for c in cases {
        for fit in &c.estimate.fits {
            ok &= fit.c1.abs() <= 3.0 * fit.c1_std_error;
            worst = worst.max(fit.c1.abs() / fit.c1_std_error);
        }
    }
    Outcome {
        id: "5",
        title: "linear coefficient statistically zero",
        pass: ok,
        detail: format!(
            "max |c1| / std err {worst:.3} (<= 3) over {} runs",
            cases.len()
        ),
    }
}

fn classification() -> Outcome {
    let start = Instant::now();
    let base = CommonArgs::default();
    let mut problems = Vec::new();
    let mut cells = 0;
    for constraint in [ConstraintArg::Volume, ConstraintArg::Perimeter] {
        let args = CommonArgs {
            constraint: Some(constraint),
            ..base.clone()
        };
        let config = RunConfig::resolve(&args, CLASSIFY_DEFAULTS).unwrap();
        let sweep = cmd_sweep(config, &SweepArgs::default()).unwrap().result;
        for cell in &sweep.cells {
            cells += 1;
            let expected = match (constraint, cell.rho > 1.0) {
                (ConstraintArg::Volume, true) => Verdict::LocalMaximizer,
                _ => Verdict::Saddle,
            };
            let finite = expected == Verdict::LocalMaximizer || cell.critical_mode.is_some();
            if cell.verdict != expected || !finite {
                problems.push(format!(
                    "rho={:.3} R={:.2} {:?}",
                    cell.rho, cell.radius, cell.verdict
                ));
            }
        }
    }
    let single = |sm: f64, sp: f64, c: ConstraintArg| {
        let args = CommonArgs {
            sigma_in: Some(sm),
            sigma_out: Some(sp),
            constraint: Some(c),
            ..base.clone()
        };
        cmd_classify(RunConfig::resolve(&args, CLASSIFY_DEFAULTS).unwrap())
            .unwrap()
            .result
    };
    let examples = [
        (
            single(2.0, 1.0, ConstraintArg::Volume),
            Verdict::LocalMaximizer,
            None,
        ),
        (
            single(1.0, 2.0, ConstraintArg::Volume),
            Verdict::Saddle,
            Some(3),
        ),
        (
            single(2.0, 1.0, ConstraintArg::Perimeter),
            Verdict::Saddle,
            Some(3),
        ),
        (
            single(1.0, 2.0, ConstraintArg::Perimeter),
            Verdict::Saddle,
            Some(2),
        ),
    ];
    for (got, verdict, mode) in &examples {
        if got.verdict != *verdict || got.critical_mode != *mode {
            problems.push(format!("{:?} {:?}", got.verdict, got.critical_mode));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: "6",
        title: "classification sweep",
        pass: problems.is_empty() && secs <= 5.0,
        detail: format!(
            "{cells} cells over 2 constraints, R=0.5 examples ok: {}, {secs:.2} s (<= 5 s){}",
            problems.is_empty(),
            if problems.is_empty() {
                String::new()
            } else {
                format!(", mismatches: {problems:?}")
            }
        ),
    }
}

fn degenerate_control(cases: &[FemCase]) -> Outcome {
    let worst = cases
        .iter()
        .map(|c| c.estimate.relative_energy_variation())
        .fold(0.0, f64::max);
    Outcome {
        id: "7",
        title: "rho = 1 energy independent of interface",
        pass: worst <= 1e-6,
        detail: format!(
            "max relative E(t) variation {worst:.2e} (<= 1e-6) over {} runs",
            cases.len()
        ),
    }
}

fn main() {
    println!("acceptance run");
    let mut outcomes = vec![
        radial_agreement(),
        energy_agreement(),
        analytic_properties(),
    ];
    outcomes.iter().for_each(line);

    let mut volume = Vec::new();
    for sigma in [(2.0, 1.0), (1.0, 2.0)] {
        for k in 1..=3 {
            volume.push(run_fem(sigma, k, Constraint::Volume));
        }
    }
    let fem = [
        fem_agreement(&volume, "4", "second-order coefficient, volume", 0.10),
        pinned_first_mode(&volume),
        first_order_criticality(&volume),
        classification(),
    ];
    fem.iter().for_each(line);
    outcomes.extend(fem);

    let control = vec![
        run_fem((1.0, 1.0), 2, Constraint::Volume),
        run_fem((1.0, 1.0), 3, Constraint::Perimeter),
    ];
    let mut perimeter = Vec::new();
    for sigma in [(2.0, 1.0), (1.0, 2.0)] {
        for k in [2, 3] {
            perimeter.push(run_fem(sigma, k, Constraint::Perimeter));
        }
    }
    let rest = [
        degenerate_control(&control),
        fem_agreement(&perimeter, "8", "second-order coefficient, perimeter", 0.15),
    ];
    rest.iter().for_each(line);
    outcomes.extend(rest);

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
