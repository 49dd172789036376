//! Kept in its own test binary because it sets a process environment variable.

use vortex_forces::scan::{load_config, SweepKind};
use vortex_forces::PhysicalConstants;

#[test]
fn environment_table_overrides_constants() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("constants.txt");
    std::fs::write(&table, "# test table\nhbar = 1.0e-34\n").unwrap();
    let cfg = dir.path().join("empty.ini");
    std::fs::write(&cfg, "").unwrap();

    std::env::set_var("VORTEX_FORCES_CONSTANTS", &table);
    let spec = load_config(&cfg).unwrap();
    let consts = PhysicalConstants::from_env_or_default().unwrap();
    std::env::set_var("VORTEX_FORCES_CONSTANTS", dir.path().join("missing.txt"));
    let missing = load_config(&cfg);
    std::env::remove_var("VORTEX_FORCES_CONSTANTS");

    assert_eq!(consts.hbar, 1.0e-34);
    assert_eq!(consts.c, PhysicalConstants::codata_2018().c);
    assert_eq!(spec.consts, consts);
    assert_eq!(spec.kind, SweepKind::RadialProfile);
    let header = spec.header();
    assert!(header.iter().any(|(k, v)| k == "const.hbar" && *v == vortex_forces::scan::format_float(1.0e-34)));
    assert!(missing.unwrap_err().to_string().contains("missing.txt"));
}
