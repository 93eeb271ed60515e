//! Seeded sampling checks of the analytic formulas.

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};
use shapecode_core::bits::BitBuf;
use shapecode_core::metrics::{asymptotic_occurrence, gef, serial_kl};
use shapecode_core::optimizer::{equivalent_cost_vector, min_avg_cost};
use shapecode_core::pipeline::{shape_decode, shape_encode, symbol_frequencies};
use shapecode_core::varn::{decode_stream, modified_varn_build, tree_to_codebook, varn_build, CodeTree};
use shapecode_core::{lz78, CostVector, Pmf, SourceSpec};

fn uniform_stream(t: &CodeTree, symbols: usize, rng: &mut StdRng) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols + 64);
    while out.len() < symbols {
        let i = rng.random_range(0..t.leaf_count());
        out.extend_from_slice(&t.leaves()[i].path);
    }
    out
}

#[test]
fn letter_frequencies_match_occurrence_probabilities() {
    let c = CostVector::new(&[1.0, 2.0, 3.0]).unwrap();
    let t = varn_build(50, &c).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let n_words = 400_000;
    let mut counts = [0u64; 3];
    let mut len = 0u64;
    for _ in 0..n_words {
        let leaf = &t.leaves()[rng.random_range(0..t.leaf_count())];
        for &s in &leaf.path {
            counts[s as usize] += 1;
        }
        len += leaf.path.len() as u64;
    }
    assert!(len >= 1_000_000);
    let cb = tree_to_codebook(&t, 50, 1).unwrap();
    let p = asymptotic_occurrence(&cb, &SourceSpec::uniform(50, 1).unwrap()).unwrap();
    let mean_len = t.average_length();
    for i in 0..3 {
        // Ratio estimator: Var(N_i - p_i L) / (n E(L)^2).
        let var: f64 = t
            .leaves()
            .iter()
            .map(|l| {
                let n = l.path.iter().filter(|&&s| s as usize == i).count() as f64;
                let d = n - p.get(i) * l.path.len() as f64;
                d * d
            })
            .sum::<f64>()
            / t.leaf_count() as f64;
        let se = (var / n_words as f64).sqrt() / mean_len;
        let emp = counts[i] as f64 / len as f64;
        assert!((emp - p.get(i)).abs() <= 3.0 * se, "symbol {i}: {emp} vs {}", p.get(i));
    }
}

#[test]
fn binary_matcher_converges_to_target() {
    let target = Pmf::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
    let c = equivalent_cost_vector(&target).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let mut first = None;
    let mut last = (0.0, 0.0, 0.0);
    for e in 4..=12 {
        let k = 1usize << e;
        let t = varn_build(k, &c).unwrap();
        let cb = tree_to_codebook(&t, 2, e).unwrap();
        let src = SourceSpec::uniform(2, e).unwrap();
        let p0 = asymptotic_occurrence(&cb, &src).unwrap().get(0);
        let g = gef(&cb, &src, &target).unwrap();
        let stream = uniform_stream(&t, 100_000, &mut rng);
        let i1 = serial_kl(&stream, &target, 1).unwrap();
        first.get_or_insert((p0, g, i1));
        last = (p0, g, i1);
    }
    let first = first.unwrap();
    assert!((last.0 - 2.0 / 3.0).abs() < (first.0 - 2.0 / 3.0).abs());
    assert!((last.0 - 2.0 / 3.0).abs() <= 0.01);
    assert!(last.1 - 1.0 <= 0.02 && last.1 < first.1);
    assert!(last.2 < first.2);
}

#[test]
fn long_message_round_trip() {
    let c = CostVector::new(&[1.0, 1.7, 2.2]).unwrap();
    let t = varn_build(100, &c).unwrap();
    let mut rng = StdRng::seed_from_u64(42);
    let msg: Vec<usize> = (0..100_000).map(|_| rng.random_range(0..100)).collect();
    let s = t.encode(&msg).unwrap();
    let d = decode_stream(&t, &s).unwrap();
    assert_eq!(d.leaves, msg);
    assert!(d.residual.is_empty());
}

#[test]
fn lz78_megabyte_round_trip() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut data = vec![0u8; 1 << 20];
    rng.fill_bytes(&mut data);
    let c = lz78::compress(&data);
    // Random bytes do not compress.
    assert!(c.len() > 8 * data.len());
    assert_eq!(lz78::decompress(&c).unwrap(), data);
}

#[test]
fn shaped_cost_matches_tree_prediction() {
    let flash = CostVector::new(&[0.0, 0.58, 0.87, 1.29]).unwrap();
    let s = min_avg_cost(&flash, 2.0, 2.740).unwrap();
    let eq = equivalent_cost_vector(&s.p_hat).unwrap();
    let t = modified_varn_build(8, &eq).unwrap();
    let mut rng = StdRng::seed_from_u64(1);
    let bits: BitBuf = (0..1_000_000).map(|_| rng.random::<bool>()).collect();
    let shaped = shape_encode(&bits, &t).unwrap();
    assert_eq!(shape_decode(&shaped, &t).unwrap(), bits);

    let freqs = symbol_frequencies(&shaped.symbols, 4);
    let measured: f64 = freqs.iter().zip(eq.costs()).map(|(p, c)| p * c).sum();
    let counts = t.letter_counts();
    let predicted: f64 =
        counts.iter().zip(eq.costs()).map(|(n, c)| n * c).sum::<f64>() / t.average_length();
    assert!((measured - predicted).abs() <= 0.02 * predicted, "{measured} vs {predicted}");
}
