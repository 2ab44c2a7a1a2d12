//! Covering map `Φ = e^{G + iv}` from the Green function, checked against
//! the identity on the disk and against the curvature solver on an ellipse.
use poincare_lab::riemann_map::{
    boundary_degree, covering_map, green_function, harmonic_conjugate, pullback_identity_check, BranchCut,
};
use poincare_lab::solver::{blowup_ladder, SolverConfig};
use poincare_lab::{build_grid, DomainSpec, Point, ScalarField};

fn main() -> poincare_lab::Result<()> {
    let n: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128.0);
    let h = 1.0 / n;

    let disk = build_grid(&DomainSpec::UnitDisk, h)?;
    let g = green_function(&disk, Point::new(0.0, 0.0))?;
    let v = harmonic_conjugate(&g, &BranchCut::default())?;
    let phi = covering_map(&g, &v)?;
    let delta = disk.boundary_distance();
    let err = (0..disk.len())
        .filter(|&k| delta.values()[k] >= 0.1)
        .map(|k| {
            let x = disk.node(k).point;
            (phi.values()[k] - num_complex::Complex64::new(x.x, x.y)).norm()
        })
        .fold(0.0, f64::max);
    println!("disk: sup |Φ(z) - z| on δ >= 0.1 = {err:.2e}, winding {:.6}, degree {:.6}", v.winding, boundary_degree(&phi)?);

    let domain = DomainSpec::Ellipse { semi_major: 2.0, semi_minor: 1.0 };
    let grid = build_grid(&domain, h)?;
    let g = green_function(&grid, Point::new(0.0, 0.0))?;
    let v = harmonic_conjugate(&g, &BranchCut::default())?;
    let phi = covering_map(&g, &v)?;
    let k0 = ScalarField::constant(&grid, 0.0)?;
    let u = blowup_ladder(&grid, &k0, &SolverConfig::default())?.u;
    let check = pullback_identity_check(&phi, &u, 0.1)?;
    println!(
        "ellipse: pullback residual sup {:.3e}, rms {:.3e}; cycle defect {:.1e}, degree {:.6}",
        check.sup,
        check.l2,
        v.cycle_defect,
        boundary_degree(&phi)?
    );
    Ok(())
}
