use std::collections::HashMap;

use super::*;
use proptest::prelude::*;
use rand::Rng;
use rada_core::manifold::{random_point, ManifoldDescriptor};
use rada_core::problem::gen_gaussian_points;

#[test]
fn variance_of_top_eigenvectors_is_one() {
    let a = gen_gaussian_points(12, 5, 1).points;
    let (_, vecs) = sym_eigen_ascending(&(&a * a.transpose()));
    let top = vecs.columns(12 - 3, 3).clone_owned();
    assert!((normalized_variance(&a, &top, 3).unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn variance_hand_example() {
    let a = Mat::from_diagonal(&rada_core::linalg::Dual::from_vec(vec![3f64.sqrt(), 2f64.sqrt(), 1.0]));
    let x = Mat::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!((normalized_variance(&a, &x, 2).unwrap() - 0.8).abs() <= 1e-15);
    assert!(matches!(normalized_variance(&Mat::zeros(3, 2), &x, 2), Err(HarnessError::ZeroVariance)));
}

#[test]
fn sparsity_examples() {
    let d = 6;
    let eye = Mat::identity(d, d);
    let expect = 100.0 * (d * d - d) as f64 / (d * d) as f64;
    assert_eq!(sparsity_percent(&eye, SPARSITY_THRESHOLD), expect);
    let dense = gen_gaussian_points(40, 30, 2).points;
    assert!(sparsity_percent(&dense, SPARSITY_THRESHOLD) < 1.0);
    let hand = Mat::from_row_slice(3, 2, &[1.0, 2e-6, -0.5, 0.3, -9e-6, 4.0]);
    assert!((sparsity_percent(&hand, SPARSITY_THRESHOLD) - 200.0 / 6.0).abs() <= 1e-12);
}

fn two_clouds() -> (Mat, Vec<usize>) {
    let noise = gen_gaussian_points(2, 40, 3).points;
    let mut rows = Mat::zeros(40, 2);
    let mut truth = Vec::new();
    for i in 0..40 {
        let (cx, cy, l) = if i % 2 == 0 { (1.0, 0.0, 0) } else { (0.0, 1.0, 1) };
        rows[(i, 0)] = cx + 0.02 * noise[(0, i)];
        rows[(i, 1)] = cy + 0.02 * noise[(1, i)];
        truth.push(l);
    }
    (rows, truth)
}

#[test]
fn kmeans_separates_clouds_deterministically() {
    let (rows, truth) = two_clouds();
    let c = kmeans(&rows, 2, 10, 7).unwrap();
    assert!((nmi(&c.labels, &truth).unwrap() - 1.0).abs() <= 1e-12);
    assert_eq!(c, kmeans(&rows, 2, 10, 7).unwrap());
    assert_eq!(c.restarts.len(), 10);
}

#[test]
fn kmeans_beats_random_labelings() {
    let rows = gen_gaussian_points(30, 3, 4).points;
    let rows = rows.transpose();
    let c = kmeans(&rows, 3, 10, 1).unwrap();
    let points = normalized_rows(&rows);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let labels: Vec<usize> = (0..30).map(|_| rng.random_range(0..3)).collect();
        assert!(c.sse <= within_sse(&points, &labels, 3) + 1e-12);
    }
}

#[test]
fn kmeans_rejects_degenerate_inputs() {
    let rows = Mat::from_row_slice(4, 2, &[1.0, 0.0, 2.0, 0.0, 1.0, 0.0, 3.0, 0.0]);
    // All rows normalize to the same point.
    assert!(matches!(kmeans(&rows, 2, 3, 0), Err(HarnessError::Core(Error::DegenerateClustering { clusters: 2 }))));
    assert!(kmeans(&rows, 5, 3, 0).is_err());
}

#[test]
fn nmi_examples() {
    let a = [0, 0, 1, 1, 2, 2];
    assert!((nmi(&a, &a).unwrap() - 1.0).abs() <= 1e-15);
    assert_eq!(nmi(&a, &[4; 6]).unwrap(), 0.0);
    assert_eq!(nmi(&[3; 4], &[5; 4]).unwrap(), 1.0);
    assert!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().abs() <= 1e-15);
    assert!(nmi(&[], &[]).is_err());
    assert!(nmi(&[0, 1], &[0]).is_err());
}

/// `(H(a) + H(b) − H(a, b))/√(H(a)H(b))`, from entropies alone.
fn nmi_by_entropies(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let h = |keys: Vec<(usize, usize)>| {
        let mut m: HashMap<(usize, usize), f64> = HashMap::new();
        for k in keys {
            *m.entry(k).or_default() += 1.0;
        }
        m.values().map(|c| -(c / n) * (c / n).ln()).sum::<f64>()
    };
    let ha = h(a.iter().map(|&u| (u, 0)).collect());
    let hb = h(b.iter().map(|&v| (0, v)).collect());
    let hab = h(a.iter().zip(b).map(|(&u, &v)| (u, v)).collect());
    (ha + hb - hab) / (ha * hb).sqrt()
}

proptest! {
    #[test]
    fn nmi_properties(pairs in prop::collection::vec((0usize..4, 0usize..3), 2..60), shift in 1usize..5) {
        let a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let v = nmi(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        prop_assert!((v - nmi(&b, &a).unwrap()).abs() <= 1e-12);
        let relabeled: Vec<usize> = a.iter().map(|u| (u + shift) * 7).collect();
        prop_assert!((v - nmi(&relabeled, &b).unwrap()).abs() <= 1e-12);
        let distinct = |l: &[usize]| { let mut s = l.to_vec(); s.sort(); s.dedup(); s.len() };
        if distinct(&a) > 1 && distinct(&b) > 1 {
            prop_assert!((v - nmi_by_entropies(&a, &b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn variance_never_exceeds_one(seed in 0u64..500) {
        let a = gen_gaussian_points(9, 4, seed).points;
        let x = random_point(ManifoldDescriptor::stiefel(9, 3).unwrap(), seed + 1);
        let v = normalized_variance(&a, x.basis(), 3).unwrap();
        prop_assert!((0.0..=1.0 + 1e-10).contains(&v));
    }

    #[test]
    fn sparsity_is_a_percentage(entries in prop::collection::vec(-1e-4f64..1e-4, 1..40)) {
        let x = Mat::from_column_slice(entries.len(), 1, &entries);
        let s = sparsity_percent(&x, SPARSITY_THRESHOLD);
        prop_assert!((0.0..=100.0).contains(&s));
    }
}

fn block_basis(sizes: &[usize]) -> (Mat, Vec<usize>) {
    let n: usize = sizes.iter().sum();
    let mut x = Mat::zeros(n, sizes.len());
    let mut truth = Vec::new();
    let mut row = 0;
    for (c, &s) in sizes.iter().enumerate() {
        for _ in 0..s {
            x[(row, c)] = 1.0 / (s as f64).sqrt();
            truth.push(c);
            row += 1;
        }
    }
    (x, truth)
}

#[test]
fn ideal_block_solution_clusters_perfectly() {
    let (x, truth) = block_basis(&[5, 7, 4]);
    // Any basis of the same subspace gives the same clustering.
    let rot = random_point(ManifoldDescriptor::stiefel(3, 3).unwrap(), 5);
    let rotated = &x * rot.basis();
    for basis in [x, rotated] {
        let c = cluster_from_solution(&basis, 10, 3).unwrap();
        assert_eq!(c.labels.len(), 16);
        assert!((nmi(&c.labels, &truth).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn permuting_samples_permutes_labels() {
    let (x, truth) = block_basis(&[6, 6, 6]);
    let perm: Vec<usize> = (0..18).map(|i| (i * 5) % 18).collect();
    let px = Mat::from_fn(18, 3, |i, j| x[(perm[i], j)]);
    let ptruth: Vec<usize> = perm.iter().map(|&i| truth[i]).collect();
    let a = cluster_from_solution(&x, 10, 1).unwrap();
    let b = cluster_from_solution(&px, 10, 1).unwrap();
    let reordered: Vec<usize> = perm.iter().map(|&i| a.labels[i]).collect();
    assert!((nmi(&reordered, &b.labels).unwrap() - 1.0).abs() <= 1e-12);
    assert!((nmi(&b.labels, &ptruth).unwrap() - nmi(&a.labels, &truth).unwrap()).abs() <= 1e-12);
}
