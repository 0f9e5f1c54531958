//! Reconstruction from synthetic first-Born data on shells of wavenumbers.
use backscatter::geom::symmetric_directions;
use backscatter::inversion::{born_invert, recon_error, shell_wavenumbers, synthetic_born_dataset};
use backscatter::{Grid3, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(1.0, 1.0)?;
    let grid = Grid3::new(1.0, 12)?;
    let ks = shell_wavenumbers(0.2, 16.0, 17)?;
    let ds = synthetic_born_dataset(&q, symmetric_directions(200), ks);
    let rec = born_invert(&ds, &grid)?;
    let m = recon_error(&q, &rec)?;
    println!(
        "coverage {:.3}, imaginary residue {:.1e}, relative L2 error {:.4}, max error {:.4}",
        rec.covered_fraction, rec.imaginary_residue, m.l2_rel, m.max_abs
    );
    Ok(())
}
