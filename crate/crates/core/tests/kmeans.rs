use refknn::kmeans::{kmeans, KMeansOptions};
use refknn::metrics::ari;
use refknn_testkit::uniform_points;

fn three_blobs(seed: u64) -> (Vec<f64>, Vec<usize>) {
    let noise = uniform_points(150, 2, seed);
    let centers = [(0.0, 0.0), (10.0, 0.0), (5.0, 9.0)];
    let mut data = Vec::new();
    let mut truth = Vec::new();
    for (k, &(cx, cy)) in centers.iter().enumerate() {
        for p in noise[k * 100..(k + 1) * 100].chunks(2) {
            data.extend_from_slice(&[cx + p[0] - 0.5, cy + p[1] - 0.5]);
            truth.push(k);
        }
    }
    (data, truth)
}

#[test]
fn recovers_separated_blobs_for_every_seed() {
    let (data, truth) = three_blobs(1);
    for seed in 0..20 {
        let r = kmeans(&data, 2, 3, seed, &KMeansOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(ari(&truth, &r.labels).unwrap(), 1.0, "seed {seed}");
    }
}

#[test]
fn single_cluster_is_the_mean() {
    let data = uniform_points(40, 3, 8);
    let r = kmeans(&data, 3, 1, 0, &KMeansOptions::default()).unwrap();
    let mut inertia = 0.0;
    for d in 0..3 {
        let mean = data.iter().skip(d).step_by(3).sum::<f64>() / 40.0;
        assert!((r.centroids[d] - mean).abs() <= 1e-12);
        inertia += data
            .iter()
            .skip(d)
            .step_by(3)
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>();
    }
    assert!((r.inertia - inertia).abs() <= 1e-9);
    assert!(r.labels.iter().all(|&l| l == 0));
}

#[test]
fn two_points_two_clusters() {
    let r = kmeans(&[0.0, 0.0, 3.0, 4.0], 2, 2, 5, &KMeansOptions::default()).unwrap();
    assert_ne!(r.labels[0], r.labels[1]);
    assert_eq!(r.inertia, 0.0);
}

#[test]
fn restarts_never_increase_inertia() {
    let data = uniform_points(300, 2, 4);
    let one = kmeans(&data, 2, 6, 2, &KMeansOptions::default()).unwrap();
    let many = kmeans(
        &data,
        2,
        6,
        2,
        &KMeansOptions {
            restarts: 8,
            ..KMeansOptions::default()
        },
    )
    .unwrap();
    assert!(many.inertia <= one.inertia);
}

#[test]
fn same_seed_same_result() {
    let data = uniform_points(200, 4, 6);
    let a = kmeans(&data, 4, 5, 99, &KMeansOptions::default()).unwrap();
    let b = kmeans(&data, 4, 5, 99, &KMeansOptions::default()).unwrap();
    assert_eq!(a, b);
}
