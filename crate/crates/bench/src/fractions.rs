use std::io::Write;

use asymblis::lapack::{flop_fraction, FactorRoutine};

pub const HEADER: &str = "n,potrf_syrk_pct,getrf_gepp_pct";

pub fn write_fractions(out: &mut impl Write, nb: usize, sizes: &[usize]) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for &n in sizes {
        writeln!(
            out,
            "{n},{:.2},{:.2}",
            flop_fraction(FactorRoutine::PotrfSyrk, n, nb),
            flop_fraction(FactorRoutine::GetrfGepp, n, nb)
        )?;
    }
    Ok(())
}
