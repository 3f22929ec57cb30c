//! Replays the checked-in fuzz corpus through the fuzz checks on stable,
//! and throws random and mutated bytes at every parser.

#[path = "../fuzz/checks.rs"]
mod checks;

use std::path::PathBuf;

use proptest::prelude::*;

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut seeds: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    seeds.sort();
    seeds
}

#[test]
fn every_target_has_seeds_and_they_replay() {
    for (name, check) in checks::TARGETS {
        let seeds = corpus(name);
        assert!(!seeds.is_empty(), "{name}: empty corpus");
        for (seed, bytes) in &seeds {
            let r = std::panic::catch_unwind(|| check(bytes));
            assert!(r.is_ok(), "{name}/{seed} panicked");
        }
    }
}

#[test]
fn seeds_include_accepted_inputs() {
    use conjmatch::geometry::io::{parse_contour_csv, parse_contour_json, parse_mesh};
    use conjmatch::geometry::MeshFormat;
    let text = |t: &str, s: &str| String::from_utf8(corpus(t).into_iter().find(|x| x.0 == s).unwrap().1).unwrap();
    assert!(parse_contour_csv(&text("contour_csv", "square_header")).is_ok());
    assert!(parse_contour_json(&text("contour_json", "square")).is_ok());
    for (t, f) in [("mesh_off", MeshFormat::Off), ("mesh_obj", MeshFormat::Obj)] {
        assert!(parse_mesh(text(t, "tetrahedron").as_bytes(), f).is_ok(), "{t}");
    }
    for s in ["ascii_tetrahedron", "binary_le_tetrahedron", "binary_be_tetrahedron"] {
        let bytes = corpus("mesh_ply").into_iter().find(|x| x.0 == s).unwrap().1;
        assert_eq!(parse_mesh(&bytes, MeshFormat::Ply).unwrap().vertex_count(), 4, "{s}");
    }
    assert!(
        parse_mesh(&corpus("mesh_ply").into_iter().find(|x| x.0 == "truncated").unwrap().1, MeshFormat::Ply).is_err()
    );
}

proptest! {
    #[test]
    fn random_bytes_never_panic(target in 0..checks::TARGETS.len(), bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        (checks::TARGETS[target].1)(&bytes);
    }

    #[test]
    fn mutated_seeds_never_panic(target in 0..checks::TARGETS.len(), pick in any::<prop::sample::Index>(), edits in proptest::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0..3u8), 1..6)) {
        let (name, check) = checks::TARGETS[target];
        let seeds = corpus(name);
        let mut bytes = seeds[pick.index(seeds.len())].1.clone();
        for (at, byte, op) in edits {
            if bytes.is_empty() {
                bytes.push(byte);
                continue;
            }
            let i = at.index(bytes.len());
            match op {
                0 => bytes[i] = byte,
                1 => bytes.insert(i, byte),
                _ => { bytes.remove(i); }
            }
        }
        check(&bytes);
    }
}
