use cpoint_core::numerics::Matrix;
use cpoint_core::qp::{kkt_residual, solve_fixed_eta, sweep, QpModel, SweepOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut ChaCha8Rng, n: usize) -> QpModel {
    let k = n + 2;
    let g: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = (0..k).map(|c| g[i * k + c] * g[j * k + c]).sum::<f64>() / k as f64;
        }
        q[(i, i)] += 0.001;
    }
    let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.05..0.3)).collect();
    let te = Matrix::from_vec(1, n, vec![1.0; n]);
    let mut tl = Matrix::zeros(0, n);
    let mut tl_rhs = Vec::new();
    for i in 0..n {
        if rng.gen_bool(0.4) {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            tl.push_row(&row);
            tl_rhs.push(rng.gen_range(0.3..0.8));
        }
    }
    if n >= 2 && rng.gen_bool(0.5) {
        // Floor on the first two assets combined.
        let mut row = vec![0.0; n];
        row[0] = -1.0;
        row[1] = -1.0;
        tl.push_row(&row);
        tl_rhs.push(-0.2);
    }
    if tl_rhs.iter().filter(|&&b| b > 0.0).sum::<f64>() < 1.0 && tl_rhs.len() >= n {
        tl_rhs.iter_mut().for_each(|b| *b = b.abs().max(0.5));
    }
    let names = (0..n).map(|i| format!("a{i}")).collect();
    QpModel::new(q, p, te, vec![1.0], tl, tl_rhs, names).unwrap()
}

#[test]
fn sweep_matches_pointwise_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..150 {
        let n = rng.gen_range(1..=8);
        let m = random_model(&mut rng, n);
        let path = match sweep(&m, SweepOptions::default()) {
            Ok(p) => p,
            Err(cpoint_core::qp::QpError::InfeasibleModel) => continue,
            Err(e) => panic!("sweep failed: {e:?}\n{m:?}"),
        };
        assert!(!path.open_ended);
        for w in path.e.windows(2) {
            assert!(w[1] >= w[0] - 1e-10);
        }
        let top = path.etas.last().unwrap() * 1.5 + 0.1;
        for j in 0..=20 {
            let eta = top * j as f64 / 20.0;
            let pt = path.point_at(eta).unwrap();
            assert!(kkt_residual(&m, &pt) < 1e-9, "eta {eta}: {}", kkt_residual(&m, &pt));
            let direct = solve_fixed_eta(&m, eta).unwrap().point;
            for i in 0..n {
                assert!((pt.x[i] - direct.x[i]).abs() < 1e-8, "eta {eta} {:?} {:?}", pt.x, direct.x);
            }
        }
        checked += 1;
    }
    assert!(checked > 100);
}
