use medianshape::complex::build_grid_2d;
use medianshape::tu::{check_totally_unimodular, i_sum, is_totally_unimodular, isum_counterexample, IntMatrix};
use medianshape::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cofactor expansion along the first row.
fn laplace(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    let n = m.len();
    let mut det = 0;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * m[0][j] * laplace(&minor);
    }
    det
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn oracle_tu(rows: &[Vec<i64>]) -> bool {
    let (r, c) = (rows.len(), rows[0].len());
    (1..=r.min(c)).all(|k| {
        subsets(r, k).iter().all(|rs| {
            subsets(c, k).iter().all(|cs| {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
                laplace(&sub).abs() <= 1
            })
        })
    })
}

/// Signed incidence matrix of a random digraph; always TU.
fn network_matrix(rng: &mut ChaCha8Rng, nodes: usize, arcs: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0; arcs]; nodes];
    for a in 0..arcs {
        let u = rng.gen_range(0..nodes);
        let v = (u + rng.gen_range(1..nodes)) % nodes;
        m[u][a] = 1;
        m[v][a] = -1;
    }
    m
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    if rng.gen_bool(0.4) && r >= 2 {
        return network_matrix(rng, r, c);
    }
    let density = rng.gen_range(0.2..0.7);
    (0..r)
        .map(|_| (0..c).map(|_| if rng.gen_bool(density) { [1, -1][rng.gen_range(0..2)] } else { 0 }).collect())
        .collect()
}

#[test]
fn verdicts_agree_with_cofactor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = [0usize; 2];
    for _ in 0..100 {
        let rows = random_matrix(&mut rng);
        let m = IntMatrix::from_rows(&rows).unwrap();
        let expected = oracle_tu(&rows);
        let verdict = is_totally_unimodular(&m).unwrap();
        assert_eq!(verdict.is_unimodular(), expected, "{rows:?}");
        if let Some(w) = verdict.witness() {
            let sub = m.submatrix(&w.rows, &w.cols).unwrap();
            assert_eq!(laplace(&sub.to_rows()), w.det);
            assert!(w.det.abs() > 1);
        }
        for k in 1..=rows.len().min(rows[0].len()).min(4) {
            let rs: Vec<usize> = (0..k).collect();
            let sub = m.submatrix(&rs, &rs).unwrap();
            assert_eq!(sub.determinant().unwrap(), laplace(&sub.to_rows()) as i128);
        }
        seen[usize::from(expected)] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn preserving_operations_keep_the_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let m = IntMatrix::from_rows(&random_matrix(&mut rng)).unwrap();
        let tu = is_totally_unimodular(&m).unwrap().is_unimodular();
        let mut rp: Vec<usize> = (0..m.rows()).collect();
        rp.shuffle(&mut rng);
        let mut cp: Vec<usize> = (0..m.cols()).collect();
        cp.shuffle(&mut rng);
        let i = rng.gen_range(0..m.rows());
        let j = rng.gen_range(0..m.cols());
        let variants = [
            m.transpose(),
            m.permute_rows(&rp).unwrap().permute_cols(&cp).unwrap(),
            m.negate_row(i).unwrap().negate_col(j).unwrap(),
            m.append_zero_row().append_unit_col(i, true).unwrap().append_unit_row(j, false).unwrap(),
            m.repeat_row(i).unwrap().repeat_col(j).unwrap(),
        ];
        for v in &variants {
            assert_eq!(is_totally_unimodular(v).unwrap().is_unimodular(), tu);
        }
    }
}

#[test]
fn counterexample_and_its_isum() {
    let a = isum_counterexample();
    assert!(oracle_tu(&a.to_rows()));
    assert!(is_totally_unimodular(&a).unwrap().is_unimodular());
    let s = i_sum(&a, 2).unwrap();
    assert!(!oracle_tu(&s.to_rows()));
    let v = is_totally_unimodular(&s).unwrap();
    let w = v.witness().unwrap();
    assert_eq!(w.det.abs(), 2);
    assert_eq!(laplace(&s.submatrix(&w.rows, &w.cols).unwrap().to_rows()), w.det);
}

#[test]
fn triangulated_grid_boundaries() {
    let small: Complex = build_grid_2d(2, 2, 1.0, 1.0).unwrap();
    let d2 = IntMatrix::from_boundary(&small.boundary_matrix(1).unwrap());
    let (v, exhaustive) = check_totally_unimodular(&d2, 100_000, 1);
    assert!(exhaustive && v.is_unimodular());
    let d1 = IntMatrix::from_boundary(&small.boundary_matrix(0).unwrap());
    assert!(check_totally_unimodular(&d1, 100_000, 1).0.is_unimodular());

    let wider: Complex = build_grid_2d(3, 2, 1.0, 1.0).unwrap();
    let d2 = IntMatrix::from_boundary(&wider.boundary_matrix(1).unwrap());
    assert_eq!((d2.rows(), d2.cols()), (23, 12));
    let (v, exhaustive) = check_totally_unimodular(&d2, 100_000, 2);
    assert!(!exhaustive && v.is_unimodular());
}
