//! The shipped synthetic viscosity fixture, regenerated on demand.
//!
//! `fixtures/synth.csv` and `fixtures/synth_meta.csv` are byte-identical to
//! [`synthetic_fixture`]; a test guards this.

use enwidth_core::nonequil_observables::synthetic_liquid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{Table, fmt_f64};
use crate::{row, CliError};

/// `(liquid id, Ā, T_l in K, η(T_l) in Pa·s)` of the noiseless fixture.
pub const FIXTURE_LIQUIDS: [(&str, f64, f64, f64); 2] = [("synth-a", 0.085, 1400.0, 10.0), ("synth-b", 0.06, 900.0, 3.0)];
pub const FIXTURE_ROWS: usize = 16;

/// `(data CSV, metadata CSV)`.
pub fn synthetic_fixture() -> Result<(Vec<u8>, Vec<u8>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut data = Table::new(&crate::ingest::DATA_HEADER);
    let mut meta = Table::new(&crate::ingest::META_HEADER);
    for (id, abar, t_l, eta_l) in FIXTURE_LIQUIDS {
        let s = synthetic_liquid(id, abar, t_l, eta_l, FIXTURE_ROWS, 0.0, &mut rng)?;
        for r in &s.record.rows {
            data.push(row![id, r.t_k, r.eta]);
        }
        meta.push(vec![id.to_string(), fmt_f64(t_l), fmt_f64(eta_l)]);
    }
    Ok((data.to_csv()?, meta.to_csv()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixture_matches_generator() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
        let (data, meta) = synthetic_fixture().unwrap();
        assert_eq!(std::fs::read(format!("{dir}/synth.csv")).unwrap(), data);
        assert_eq!(std::fs::read(format!("{dir}/synth_meta.csv")).unwrap(), meta);
    }
}
