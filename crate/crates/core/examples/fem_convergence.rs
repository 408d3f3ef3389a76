//! Mesh-refinement study of the finite-element estimate of `Q(k)`.
//!
//! ```text
//! cargo run --release -p torsion-core --example fem_convergence -- [h] [levels]
//! ```

use std::time::Instant;

use torsion_core::fem2d::{estimate_q, FemOptions};
use torsion_core::{BallGeometry, Constraint, Medium};

fn main() {
    let mut args = std::env::args().skip(1);
    let h: f64 = args
        .next()
        .map_or(0.04, |s| s.parse().expect("h is a number"));
    let levels: usize = args
        .next()
        .map_or(3, |s| s.parse().expect("levels is an integer"));
    let geom = BallGeometry::new(2, 0.5).unwrap();
    let cases = [
        ((2.0, 1.0), 1, Constraint::Volume),
        ((1.0, 2.0), 3, Constraint::Volume),
        ((2.0, 1.0), 2, Constraint::Perimeter),
    ];
    for ((sm, sp), k, constraint) in cases {
        let medium = Medium::new(sm, sp).unwrap();
        let options = FemOptions {
            h,
            levels,
            ..FemOptions::default()
        };
        let start = Instant::now();
        let est = match estimate_q(&geom, &medium, k, constraint, &options) {
            Ok(est) => est,
            Err(e) => {
                println!("({sm},{sp}) k={k} {constraint}: {e}");
                continue;
            }
        };
        println!(
            "({sm},{sp}) k={k} {constraint}: estimate {:.8e}, exact {:.8e}, rel err {:.2e}, {:.1} s",
            est.q_estimate,
            est.q_analytic,
            est.rel_error,
            start.elapsed().as_secs_f64()
        );
        for (level, fit) in est.mesh_levels.iter().zip(&est.fits) {
            println!(
                "  h = {:<7} nodes = {:<7} c2 = {:.8e}  c1 = {:+.1e} (se {:.1e})",
                level.h, level.nodes, fit.c2, fit.c1, fit.c1_std_error
            );
        }
        if !est.refinement_ratios.is_empty() {
            println!("  refinement ratios {:.2?}", est.refinement_ratios);
        }
    }
}
