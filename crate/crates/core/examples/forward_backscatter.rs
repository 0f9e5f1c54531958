//! Backscattering amplitudes of a weak bump, compared with the first Born term.
use backscatter::amplitude::{backscatter_dataset, born_amplitude, SolverConfig};
use backscatter::geom::neg;
use backscatter::{ComplexWavenumber, Grid3, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(0.3, 1.0)?;
    let grid = Grid3::new(1.0, 16)?;
    let ks: Vec<_> = [1.0, 2.0, 4.0].iter().map(|&k| ComplexWavenumber::real(k)).collect::<Result<_, _>>()?;
    let ds = backscatter_dataset(&q, &grid, 4, &ks, SolverConfig::default())?;
    println!("direction            k     |A|          |A_Born|");
    for (d, beta) in ds.directions.iter().enumerate() {
        for (j, k) in ds.k_values.iter().enumerate() {
            let a = ds.get(d, j).expect("solved");
            let b = born_amplitude(&q, neg(*beta), *beta, k.k().re);
            println!("{:>2} {:>16.3} {:.6e} {:.6e}", d, k.k().re, a.norm(), b.norm());
        }
    }
    Ok(())
}
