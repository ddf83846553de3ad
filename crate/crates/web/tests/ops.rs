use projmotif::seqcore::generate_planted;
use projmotif_web::{bucket_histogram_json, explore_params_json, generate_and_find_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn choose(n: u64, k: u64) -> f64 {
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128) as f64
}

#[test]
fn explorer_curve_matches_direct_formulas() {
    let v = parse(explore_params_json(15, 4, 20, 600, 0.95, 3).unwrap());
    assert_eq!(v["chosen"]["k"], 10);
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 11);
    let x = 20.0 * (600.0 - 15.0 + 1.0);
    for (i, point) in curve.iter().enumerate() {
        let k = i as u64 + 1;
        assert_eq!(point["k"], k);
        let p = choose(11, k) / choose(15, k);
        assert!((point["p_hat"].as_f64().unwrap() - p).abs() < 1e-12);
        let s = ((2.0 * x / 4f64.powi(k as i32)).ceil() as u64).max(3);
        assert_eq!(point["s"], s);
        let tail = point["tail"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&tail));
        if let Some(m) = point["m"].as_u64() {
            let q_reached = 1.0 - tail.powi(m as i32);
            assert!(q_reached >= 0.95 - 1e-12);
            assert!(m == 1 || 1.0 - tail.powi(m as i32 - 1) < 0.95);
        }
    }
    assert_eq!(v["chosen"], curve[9]);
}

#[test]
fn explorer_rejects_bad_input() {
    assert!(explore_params_json(15, 4, 20, 600, 1.5, 3).is_err());
    assert!(explore_params_json(15, 4, 20, 10, 0.95, 3).is_err());
    assert!(explore_params_json(15, 4, 0, 600, 0.95, 3).is_err());
}

#[test]
fn find_reports_consistent_alignment() {
    let (t, n, l, d, seed) = (20, 300, 12, 2, 12);
    let v = parse(generate_and_find_json(t, n, l, d, seed).unwrap());
    let seqs: Vec<&str> = v["sequences"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    let rows = v["alignment"].as_array().unwrap();
    let positions = v["found"]["positions"].as_array().unwrap();
    assert_eq!(seqs.len(), t);
    let mut counts = vec![[0u32; 4]; l];
    for ((seq, row), pos) in seqs.iter().zip(rows).zip(positions) {
        let j = pos.as_u64().unwrap() as usize;
        let row = row.as_str().unwrap();
        assert_eq!(&seq[j - 1..j - 1 + l], row);
        for (c, b) in row.bytes().enumerate() {
            counts[c]["ACTG".find(b as char).unwrap()] += 1;
        }
    }
    let profile = v["profile"].as_array().unwrap();
    for (r, line) in profile.iter().enumerate() {
        for (c, cell) in line.as_array().unwrap().iter().enumerate() {
            assert_eq!(cell.as_u64().unwrap() as u32, counts[c][r]);
        }
    }
    let score: u32 = counts.iter().map(|col| *col.iter().max().unwrap()).sum();
    assert_eq!(v["found"]["score"], score);
    assert_eq!(v["max_score"], l * t);

    let inst = generate_planted(t, n, l, d, seed).unwrap();
    assert_eq!(
        v["planted"]["motif"],
        String::from_utf8(inst.motif.clone()).unwrap()
    );
    assert_eq!(v["found"]["motif"], v["planted"]["motif"]);
    let recovered = inst
        .positions
        .iter()
        .zip(positions)
        .filter(|(a, b)| **a as u64 == b.as_u64().unwrap())
        .count();
    assert_eq!(v["positions_recovered"], recovered);
}

#[test]
fn histogram_accounts_for_every_lmer_and_the_plant() {
    let (t, n, l, d, seed) = (20, 300, 12, 2, 7);
    let inst = generate_planted(t, n, l, d, seed).unwrap();
    for trial in 0..5 {
        let v = parse(bucket_histogram_json(t, n, l, d, seed, trial).unwrap());
        let total: u64 = v["histogram"]
            .as_array()
            .unwrap()
            .iter()
            .map(|pair| pair[0].as_u64().unwrap() * pair[1].as_u64().unwrap())
            .sum();
        assert_eq!(total, (t * (n - l + 1)) as u64);
        let kept: Vec<usize> = v["kept"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_u64().unwrap() as usize)
            .collect();
        assert_eq!(kept.len(), v["k"].as_u64().unwrap() as usize);
        let expected_key: String = kept.iter().map(|&c| inst.motif[c - 1] as char).collect();
        assert_eq!(v["planted"]["key"], expected_key);
        // a planted copy lands in the motif's bucket iff none of its mutations is kept
        let clean = inst
            .mutation_sets
            .iter()
            .filter(|muts| muts.iter().all(|c| !kept.contains(c)))
            .count();
        assert_eq!(v["planted"]["occurrences"], clean);
        assert!(v["planted"]["size"].as_u64().unwrap() >= clean as u64);
    }
}
