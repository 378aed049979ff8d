//! On-disk cache of structure tables, one JSON file per type and convention.
//!
//! Writes go through a temporary file in the cache directory and are renamed
//! into place, so a reader never sees a half-written table. A file that does
//! not parse, names another convention or toolkit version, or describes a
//! different type is rebuilt with a warning on standard error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use liecert::chevalley::{build_semisimple, LieAlgebra, StructureTable, CONVENTION_ID, TOOLKIT_VERSION};
use liecert::rootsys::RootSystem;

pub fn table_path(dir: &Path, rs: &RootSystem) -> PathBuf {
    dir.join(format!("structure-{}-{}.json", rs.name(), CONVENTION_ID))
}

/// Why a cached table was not used.
#[derive(Debug, PartialEq, Eq)]
pub enum Stale {
    Missing,
    Corrupt(String),
    Mismatch(String),
}

fn try_load(path: &Path, rs: &RootSystem) -> Result<LieAlgebra, Stale> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(_) => return Err(Stale::Missing),
    };
    let table: StructureTable =
        serde_json::from_slice(&bytes).map_err(|e| Stale::Corrupt(e.to_string()))?;
    if table.convention != CONVENTION_ID {
        return Err(Stale::Mismatch(format!("convention {}", table.convention)));
    }
    if table.toolkit_version != TOOLKIT_VERSION {
        return Err(Stale::Mismatch(format!("toolkit version {}", table.toolkit_version)));
    }
    if table.family != rs.family() || table.rank != rs.rank() {
        return Err(Stale::Mismatch(format!("type {}{}", table.family, table.rank)));
    }
    table.to_algebra().map_err(|e| Stale::Corrupt(e.to_string()))
}

pub fn store(dir: &Path, rs: &RootSystem, g: &LieAlgebra) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    let table = StructureTable::from_algebra(rs, g);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    serde_json::to_writer(&mut tmp, &table)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(table_path(dir, rs))?;
    Ok(())
}

/// The structure table for `rs`, from the cache when it is valid and
/// rebuilt (and rewritten) otherwise.
pub fn load_or_build(dir: Option<&Path>, rs: &RootSystem) -> LieAlgebra {
    let Some(dir) = dir else {
        return build_semisimple(rs);
    };
    let path = table_path(dir, rs);
    match try_load(&path, rs) {
        Ok(g) => return g,
        Err(Stale::Missing) => {}
        Err(Stale::Corrupt(why)) => {
            eprintln!("warning: corrupt structure cache {} ({why}); rebuilding", path.display())
        }
        Err(Stale::Mismatch(why)) => {
            eprintln!("warning: structure cache {} has {why}; rebuilding", path.display())
        }
    }
    let g = build_semisimple(rs);
    if let Err(e) = store(dir, rs, &g) {
        eprintln!("warning: could not write structure cache: {e:#}");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use liecert::rootsys::Family;

    #[test]
    fn cold_then_warm_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let cold = load_or_build(Some(dir.path()), &rs);
        let bytes = fs::read(table_path(dir.path(), &rs)).unwrap();
        let warm = load_or_build(Some(dir.path()), &rs);
        assert_eq!(
            StructureTable::from_algebra(&rs, &cold),
            StructureTable::from_algebra(&rs, &warm)
        );
        assert_eq!(fs::read(table_path(dir.path(), &rs)).unwrap(), bytes);
    }

    #[test]
    fn stale_tables_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let rs = RootSystem::build(Family::A, 2).unwrap();
        let path = table_path(dir.path(), &rs);
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(try_load(&path, &rs), Err(Stale::Corrupt(_))));

        let mut table = StructureTable::from_algebra(&rs, &build_semisimple(&rs));
        table.convention = "older".into();
        fs::write(&path, serde_json::to_vec(&table).unwrap()).unwrap();
        assert!(matches!(try_load(&path, &rs), Err(Stale::Mismatch(_))));

        let other = RootSystem::build(Family::B, 2).unwrap();
        let table = StructureTable::from_algebra(&other, &build_semisimple(&other));
        fs::write(&path, serde_json::to_vec(&table).unwrap()).unwrap();
        assert!(matches!(try_load(&path, &rs), Err(Stale::Mismatch(_))));

        load_or_build(Some(dir.path()), &rs);
        assert!(try_load(&path, &rs).is_ok());
        assert_eq!(try_load(&dir.path().join("nope.json"), &rs).err(), Some(Stale::Missing));
    }
}
