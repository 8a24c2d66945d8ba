use proptest::prelude::*;

use eigengesture::dataset::{synthesize_corpus, SynthConfig};
use eigengesture::decomposition::{error_curve, svd};
use eigengesture::preprocess::{preprocess_corpus, PreprocessOptions, Preprocessed};

fn run(cfg: &SynthConfig) -> Preprocessed {
    let recs = synthesize_corpus(cfg).unwrap();
    preprocess_corpus(&recs, cfg.gestures, cfg.realisations, &PreprocessOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn noiseless_rank_is_recovered(rank in 1usize..8, seed in 0u64..1000, k in 3usize..8, l in 3usize..7) {
        let cfg = SynthConfig {
            gestures: k,
            realisations: l,
            true_rank: rank.min(k * l - 1),
            noise_sigma: 0.0,
            length_range: (20, 90),
            seed,
            ..SynthConfig::default()
        };
        let pre = run(&cfg);
        let d = svd(&pre.matrix).unwrap();
        prop_assert!(d.numerical_rank(1e-8) <= cfg.true_rank);
        let curve = error_curve(&pre.matrix, &d, d.q()).unwrap();
        // d is normalised by the rank-1 residual, so d(1) = 1 always.
        let r = cfg.true_rank;
        if r > 1 {
            prop_assert!(curve.values[r - 1] < 1e-8, "d({r}) = {}", curve.values[r - 1]);
            prop_assert!(curve.values[r - 2] > 0.0);
        }
    }
}

#[test]
fn rank_one_columns_are_multiples() {
    let cfg = SynthConfig {
        gestures: 4,
        realisations: 5,
        true_rank: 1,
        noise_sigma: 0.0,
        ..SynthConfig::default()
    };
    let pre = run(&cfg);
    let x = pre.matrix.matrix();
    let (best, _) = x
        .column_iter()
        .enumerate()
        .map(|(j, c)| (j, c.norm()))
        .fold((0, 0.0), |acc, (j, n)| if n > acc.1 { (j, n) } else { acc });
    let base = x.column(best).into_owned();
    let unit = &base / base.norm();
    for c in x.column_iter() {
        let residual = c - &unit * unit.dot(&c);
        assert!(
            residual.norm() <= 1e-8 * base.norm(),
            "column is not a multiple: {}",
            residual.norm()
        );
    }
}

#[test]
fn noise_fills_the_spectrum() {
    let cfg = SynthConfig {
        gestures: 5,
        realisations: 6,
        true_rank: 3,
        noise_sigma: 0.05,
        ..SynthConfig::default()
    };
    let d = svd(&run(&cfg).matrix).unwrap();
    assert_eq!(d.numerical_rank(1e-8), d.q());
}
