//! Regenerates `fixtures/synth.csv` and `fixtures/synth_meta.csv`.

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    let (data, meta) = enwidth_cli::fixtures::synthetic_fixture()?;
    std::fs::write(dir.join("synth.csv"), data)?;
    std::fs::write(dir.join("synth_meta.csv"), meta)?;
    Ok(())
}
