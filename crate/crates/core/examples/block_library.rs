//! The projected block library on disk: write it, read it back, truncate it
//! to a smaller rank and check it against projecting truncated bases.

use std::collections::BTreeMap;
use std::sync::Arc;

use romdd::dgdd::{ComponentPool, ReferenceDomain};
use romdd::mesh::{gen_quad_grid, gen_tri_grid};
use romdd::physics::WaveRange;
use romdd::rom::{collect_snapshots_poisson, pod_train, PodBasis, ReducedBlockLibrary, Truncation};

fn main() -> romdd::Result<()> {
    let pool = ComponentPool::new()
        .with(ReferenceDomain::poisson("q", Arc::new(gen_quad_grid(8)?))?)
        .with(ReferenceDomain::poisson("t", Arc::new(gen_tri_grid(6)?))?);
    let mut bases = BTreeMap::new();
    for d in pool.iter() {
        let set = collect_snapshots_poisson(d, 80, 3, WaveRange::TRAIN)?;
        bases.insert(d.name().to_string(), pod_train(&set, Truncation::Rank(12))?);
    }
    let lib = ReducedBlockLibrary::project_operators(&pool, &bases, 4.0, 1.0)?;

    let dir = std::env::temp_dir().join("romdd-block-library");
    lib.write_dir(&dir)?;
    let mut names: Vec<String> =
        std::fs::read_dir(&dir).expect("written").flatten().map(|e| e.file_name().to_string_lossy().into()).collect();
    names.sort();
    println!("{} files: {}", names.len(), names.join(" "));
    let back = ReducedBlockLibrary::read_dir(&dir)?;
    println!("read back identical: {}", back == lib);

    let small: BTreeMap<String, usize> = [("q".to_string(), 5), ("t".to_string(), 7)].into();
    let cut = lib.truncated(&small)?;
    let cut_bases: BTreeMap<String, PodBasis> =
        bases.iter().map(|(k, b)| Ok((k.clone(), b.truncated(small[k])?))).collect::<romdd::Result<_>>()?;
    let direct = ReducedBlockLibrary::project_operators(&pool, &cut_bases, 4.0, 1.0)?;
    let dev = cut.domain["q"].max_abs_diff(&direct.domain["q"]);
    println!("truncated library vs projecting truncated bases: max deviation {dev:.1e}");
    std::fs::remove_dir_all(dir).ok();
    Ok(())
}
