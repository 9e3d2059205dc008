use std::path::Path;

use bqp_admm::cli::params::{Method, SolverParams};
use bqp_admm::cli::pipeline::{load_instance, run_method, Source};
use bqp_admm::graph::DEFAULT_PIXEL_CAP;
use bqp_admm::instances::brute_force;
use bqp_admm::Partition;

/// Plain PGM from row-major gray levels in `0..=255`.
fn write_pgm(path: &Path, w: usize, h: usize, px: &[u8]) {
    let mut text = format!("P2\n{w} {h}\n255\n");
    for row in px.chunks(w) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// 4-connected components of equal gray level, labelled in scan order.
fn components(w: usize, h: usize, px: &[u8]) -> Vec<usize> {
    let mut label = vec![usize::MAX; w * h];
    let mut next = 0;
    for start in 0..w * h {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (r, c) = (i / w, i % w);
            let mut nb = Vec::new();
            if r > 0 {
                nb.push(i - w);
            }
            if r + 1 < h {
                nb.push(i + w);
            }
            if c > 0 {
                nb.push(i - 1);
            }
            if c + 1 < w {
                nb.push(i + 1);
            }
            for j in nb {
                if label[j] == usize::MAX && px[j] == px[i] {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// True when the partition's two classes are exactly the two components.
fn splits_components(p: &Partition, comp: &[usize]) -> bool {
    let labels = p.labels();
    (0..comp.len())
        .all(|i| (0..comp.len()).all(|j| (comp[i] == comp[j]) == (labels[i] == labels[j])))
}

fn left_column_image() -> Vec<u8> {
    (0..9).map(|i| if i % 3 == 0 { 0 } else { 255 }).collect()
}

fn two_tone_image() -> Vec<u8> {
    // a dark rectangle on a light background
    (0..64)
        .map(|i| {
            let (r, c) = (i / 8, i % 8);
            if (2..6).contains(&r) && (1..5).contains(&c) {
                50
            } else {
                200
            }
        })
        .collect()
}

#[test]
fn left_column_split_is_the_max_cut_and_is_found() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("col.pgm");
    let px = left_column_image();
    write_pgm(&path, 3, 3, &px);
    let src = Source::Image {
        path,
        c: 0.0,
        pixel_cap: DEFAULT_PIXEL_CAP,
    };
    let inst = load_instance("col", &src, None, None).unwrap();
    let comp = components(3, 3, &px);

    let (best, _) = brute_force(&inst.cost).unwrap();
    assert!(splits_components(&best, &comp));

    for method in [Method::V, Method::Mr1, Method::Mrr] {
        for seed in 0..5 {
            let out = run_method(&inst, method, &SolverParams::default(), seed).unwrap();
            assert!(
                splits_components(&out.partition, &comp),
                "{method} seed {seed}"
            );
        }
    }
}

#[test]
fn two_tone_image_is_split_along_its_components() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tones.pgm");
    let px = two_tone_image();
    write_pgm(&path, 8, 8, &px);
    let comp = components(8, 8, &px);
    assert_eq!(comp.iter().max(), Some(&1));

    // with c = 0 every cross-tone pair has the same weight and no other pair
    // has any, so the tone split is the unique max cut up to a flip
    let src = Source::Image {
        path,
        c: 0.0,
        pixel_cap: DEFAULT_PIXEL_CAP,
    };
    let inst = load_instance("tones", &src, None, None).unwrap();
    for method in [Method::V, Method::Mr1] {
        for seed in 0..6 {
            let out = run_method(&inst, method, &SolverParams::default(), seed).unwrap();
            assert!(
                splits_components(&out.partition, &comp),
                "{method} seed {seed}"
            );
        }
    }
    // the default absolute penalty is small for a cost of this magnitude
    let mrr = SolverParams {
        rho0: Some("0.05L1".parse().unwrap()),
        ..Default::default()
    };
    for seed in 0..6 {
        let out = run_method(&inst, Method::Mrr, &mrr, seed).unwrap();
        assert!(splits_components(&out.partition, &comp), "MRR seed {seed}");
    }
}

#[test]
fn pixel_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tones.pgm");
    write_pgm(&path, 8, 8, &two_tone_image());
    let src = Source::Image {
        path,
        c: 0.0,
        pixel_cap: 63,
    };
    assert!(load_instance("tones", &src, None, None).is_err());
}
