//! The binary feature layout shared with the feature extractor.

use std::path::Path;
use std::process::Command;

use prcurve::data::SampleSet;
use prcurve::io::{decode_features, load_features, save_features, FeatureFormat};

/// Bytes laid out field by field, independent of the library encoder.
fn handmade(n: u32, d: u32, value: impl Fn(u32, u32) -> f32, labels: Option<&[i32]>) -> Vec<u8> {
    let mut out = b"PRDF".to_vec();
    for w in [1u32, n, d] {
        out.extend_from_slice(&w.to_le_bytes());
    }
    for i in 0..n {
        for j in 0..d {
            out.extend_from_slice(&value(i, j).to_le_bytes());
        }
    }
    if let Some(labels) = labels {
        out.push(1);
        for l in labels {
            out.extend_from_slice(&l.to_le_bytes());
        }
    }
    out
}

#[test]
fn extractor_sized_file_loads() {
    let bytes = handmade(10, 2048, |i, j| (i * 2048 + j) as f32 * 0.25, None);
    let set = decode_features(&bytes).unwrap();
    assert_eq!((set.rows(), set.cols()), (10, 2048));
    assert_eq!(set.row(3)[5], (3.0 * 2048.0 + 5.0) * 0.25);
    assert!(set.labels().is_none());
}

#[test]
fn labels_follow_the_flag_byte() {
    let bytes = handmade(3, 2, |i, j| (i + j) as f32, Some(&[4, -1, 7]));
    let set = decode_features(&bytes).unwrap();
    assert_eq!(set.labels(), Some(&[4, -1, 7][..]));
}

#[test]
fn library_encoder_matches_the_layout() {
    let dir = tempfile::tempdir().unwrap();
    let set = SampleSet::new(vec![0.5, -1.25, 3.0, 8.0], 2, 2).unwrap();
    let p = dir.path().join("x.prdf");
    save_features(&set, &p, FeatureFormat::Binary).unwrap();
    let mut expected = handmade(2, 2, |i, j| set.row(i as usize)[j as usize] as f32, None);
    expected.push(0);
    assert_eq!(std::fs::read(&p).unwrap(), expected);
    assert_eq!(load_features(&p).unwrap(), set);
}

#[test]
fn cli_reads_extractor_output() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, offset: f32| {
        let p = dir.path().join(name);
        let bytes = handmade(
            40,
            8,
            |i, j| offset + ((i * 7 + j * 3) % 11) as f32 * 0.1,
            None,
        );
        std::fs::write(&p, bytes).unwrap();
        p
    };
    let real = write("real.prdf", 0.0);
    let fake = write("fake.prdf", 5.0);
    let out = Command::new(env!("CARGO_BIN_EXE_prd"))
        .args([
            "estimate",
            path(&real),
            path(&fake),
            "--lambdas",
            "3",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}
