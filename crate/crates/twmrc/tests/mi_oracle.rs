//! Validates the closed-form Gaussian mutual informations against a
//! simulation oracle: draw channel inputs and noise, form the received
//! signals, estimate all second moments empirically, and evaluate the
//! conditional MI through the log-determinant identity
//! `I(U;V|W) = 1/2 log2( det S_UW det S_VW / (det S_W det S_UVW) )`.
//! The oracle shares no code path with the library's per-node formula.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twmrc::{ChannelModel, GaussianNetwork, NodeSet};

const SAMPLES: usize = 400_000;
const TOL: f64 = 0.02;

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; one value per call is plenty here.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Empirical second-moment matrix of `dim`-dimensional draws.
fn sample_moments(
    net: &GaussianNetwork,
    m: usize,
    build: impl Fn(&[f64], &mut ChaCha8Rng) -> Vec<f64>,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> DMatrix<f64> {
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    for _ in 0..SAMPLES {
        let x: Vec<f64> =
            (1..=m).map(|j| standard_normal(rng) * net.power(j).sqrt()).collect();
        let v = build(&x, rng);
        assert_eq!(v.len(), dim);
        for r in 0..dim {
            for c in 0..dim {
                acc[(r, c)] += v[r] * v[c];
            }
        }
    }
    acc / SAMPLES as f64
}

/// `I(block_u; block_v | block_w)` from a moment matrix, with index blocks.
fn mi_from_moments(s: &DMatrix<f64>, u: &[usize], v: &[usize], w: &[usize]) -> f64 {
    let det = |idx: &[usize]| -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| s[(idx[r], idx[c])]).determinant()
    };
    let uw: Vec<usize> = u.iter().chain(w).copied().collect();
    let vw: Vec<usize> = v.iter().chain(w).copied().collect();
    let uvw: Vec<usize> = u.iter().chain(v).chain(w).copied().collect();
    0.5 * ((det(&uw) * det(&vw)) / (det(w) * det(&uvw))).log2()
}

fn receive(net: &GaussianNetwork, m: usize, at: usize, x: &[f64], rng: &mut impl Rng) -> f64 {
    let mut y = standard_normal(rng) * net.noise(at).sqrt();
    for j in 1..=m {
        if j != at {
            y += net.gain(j, at) * x[j - 1];
        }
    }
    y
}

#[test]
fn node_mi_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let m = 4;
    let net = GaussianNetwork::random(m, &mut rng).unwrap();
    let model = ChannelModel::Gaussian(net.clone());

    // (senders, receiver, conditioned) triples exercising interference,
    // conditioning, and multi-sender sums.
    let cases: [(&[usize], usize, &[usize]); 3] =
        [(&[1], 2, &[3]), (&[1, 3], 4, &[]), (&[3, 4], 2, &[1])];

    for (a, i, c) in cases {
        let exact = model
            .mi_node(a.iter().copied().collect(), i, c.iter().copied().collect())
            .unwrap();

        // Moment vector layout: [y_i, x_A..., x_C...].
        let dim = 1 + a.len() + c.len();
        let s = sample_moments(
            &net,
            m,
            |x, rng| {
                let mut v = vec![receive(&net, m, i, x, rng)];
                v.extend(a.iter().map(|&j| x[j - 1]));
                v.extend(c.iter().map(|&j| x[j - 1]));
                v
            },
            dim,
            &mut rng,
        );
        let ia: Vec<usize> = (1..=a.len()).collect();
        let ic: Vec<usize> = (1 + a.len()..dim).collect();
        let est = mi_from_moments(&s, &ia, &[0], &ic);
        assert!(
            (est - exact).abs() < TOL,
            "I(X{a:?}; Y{i} | X{c:?}): exact {exact}, simulated {est}"
        );
    }
}

#[test]
fn cut_mi_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let m = 4;
    let net = GaussianNetwork::random(m, &mut rng).unwrap();
    let model = ChannelModel::Gaussian(net.clone());

    let a = [1usize, 2];
    let b = [3usize, 4];
    let exact = model
        .mi_cut(
            a.iter().copied().collect::<NodeSet>(),
            b.iter().copied().collect::<NodeSet>(),
            b.iter().copied().collect::<NodeSet>(),
        )
        .unwrap();

    // Layout: [y_3, y_4, x_1, x_2]; the receivers' own inputs are known, so
    // conditioning on X_B happens implicitly by excluding them from the
    // received sums (they are senders the receivers already cancel).
    let s = sample_moments(
        &net,
        m,
        |x, rng| {
            let mut masked = x.to_vec();
            for &j in &b {
                masked[j - 1] = 0.0; // receivers subtract known inputs
            }
            vec![
                receive(&net, m, 3, &masked, rng),
                receive(&net, m, 4, &masked, rng),
                x[0],
                x[1],
            ]
        },
        4,
        &mut rng,
    );
    let est = mi_from_moments(&s, &[2, 3], &[0, 1], &[]);
    assert!((est - exact).abs() < TOL, "cut MI: exact {exact}, simulated {est}");
}
