use acslm::topology::generators::*;
use acslm::topology::*;
use acslm::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------- independent oracles ----------

/// Dense integer boundary matrix ∂_k (rows: (k−1)-simplices, cols: k-simplices),
/// restricted to simplices accepted by `keep`.
fn dense_boundary(c: &SimplicialComplex, k: usize, keep: &dyn Fn(&[usize]) -> bool) -> Vec<Vec<i128>> {
    let rows: Vec<&Simplex> = c.simplices(k - 1).iter().filter(|s| keep(s)).collect();
    let cols: Vec<&Simplex> = c.simplices(k).iter().filter(|s| keep(s)).collect();
    let mut m = vec![vec![0i128; cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for i in 0..s.len() {
            let mut f = (*s).clone();
            f.remove(i);
            if let Some(r) = rows.iter().position(|x| **x == f) {
                m[r][j] = if i % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    m
}

/// Smith normal form diagonal by repeated row/column gcd reduction.
fn smith_diagonal(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let cols = a[0].len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero pivot in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    for i in t..rows {
                        a[i][j] -= q * a[i][t];
                    }
                }
                if a[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // move the smallest remainder into the pivot slot and repeat
            let mut best = (t, t);
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for r in a.iter_mut() {
                r.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn snf_rank(a: Vec<Vec<i128>>) -> usize {
    smith_diagonal(a).iter().filter(|&&d| d != 0).count()
}

const P: u128 = (1 << 61) - 1;

fn inv_mod(a: u128) -> u128 {
    let (mut r, mut b, mut e) = (1u128, a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

fn to_mod(v: i128) -> u128 {
    v.rem_euclid(P as i128) as u128
}

/// Row-reduces mod a 61-bit prime; returns (rank, kernel basis of the columns).
fn reduce_mod_p(a: &[Vec<i128>], cols: usize) -> (usize, Vec<Vec<u128>>) {
    let mut m: Vec<Vec<u128>> = a.iter().map(|r| r.iter().map(|&v| to_mod(v)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col]);
        for v in m[row].iter_mut() {
            *v = *v * inv % P;
        }
        for i in 0..m.len() {
            if i != row && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + P - f * m[row][j] % P) % P;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut kernel = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u128; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (P - m[r][free]) % P;
        }
        kernel.push(v);
    }
    (pivots.len(), kernel)
}

fn rank_mod_p(a: &[Vec<i128>], cols: usize) -> usize {
    reduce_mod_p(a, cols).0
}

fn transpose(a: &[Vec<i128>], cols: usize) -> Vec<Vec<i128>> {
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

struct Oracle {
    betti: Vec<usize>,
    h1c: usize,
    rank_i: usize,
    s: usize,
}

/// Betti numbers from ranks mod p, relative H¹ from the relative complex, and
/// rank i via the other half of the sequence: rank i = b1(X) − rank(H₁(A) → H₁(X)).
fn oracle(c: &SimplicialComplex) -> Oracle {
    let all = |_: &[usize]| true;
    let rk = |k: usize, keep: &dyn Fn(&[usize]) -> bool| -> usize {
        if k == 0 || k > 3 {
            return 0;
        }
        let m = dense_boundary(c, k, keep);
        let cols = c.simplices(k).iter().filter(|s| keep(s)).count();
        rank_mod_p(&m, cols)
    };
    let betti: Vec<usize> = (0..=3).map(|k| c.count(k) - rk(k, &all) - rk(k + 1, &all)).collect();
    let interior = |s: &[usize]| !c.is_boundary(s);
    let n_int_edges = c.simplices(1).iter().filter(|s| interior(s)).count();
    let h1c = n_int_edges - rk(1, &interior) - rk(2, &interior);

    // boundary cycles Z₁(A), mod p, mapped into the edge space of X
    let in_a = |s: &[usize]| c.is_boundary(s);
    let a_edges: Vec<&Simplex> = c.simplices(1).iter().filter(|s| in_a(s)).collect();
    let d1a = dense_boundary(c, 1, &in_a);
    let (_, z1a) = reduce_mod_p(&d1a, a_edges.len());
    let ne = c.count(1);
    let b1x = transpose(&dense_boundary(c, 2, &all), c.count(2));
    let rank_b = rank_mod_p(&b1x, ne);
    let mut stacked = b1x.clone();
    for z in &z1a {
        let mut row = vec![0i128; ne];
        for (i, e) in a_edges.iter().enumerate() {
            row[c.index_of(e).unwrap()] = z[i] as i128;
        }
        stacked.push(row);
    }
    let r = rank_mod_p(&stacked, ne) - rank_b;

    let mut parent: Vec<usize> = (0..c.n_vertices).collect();
    fn root(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = root(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for e in c.simplices(1).iter().filter(|s| in_a(s)) {
        let (a, b) = (root(&mut parent, e[0]), root(&mut parent, e[1]));
        parent[a] = b;
    }
    let mut roots: Vec<usize> = c
        .simplices(0)
        .iter()
        .filter(|s| in_a(s))
        .map(|v| root(&mut parent, v[0]))
        .collect();
    roots.sort();
    roots.dedup();
    Oracle {
        rank_i: betti[1] - r,
        betti,
        h1c,
        s: roots.len(),
    }
}

fn check_against_oracle(c: &SimplicialComplex) -> CohomologyReport {
    let rep = cohomology_report(c).unwrap();
    let o = oracle(c);
    assert_eq!(rep.betti, o.betti);
    assert_eq!(rep.dim_h1c, o.h1c);
    assert_eq!(rep.rank_i, o.rank_i);
    assert_eq!(rep.s, o.s);
    assert_eq!(rep.dim_h1c, rep.rank_i + rep.s - 1);
    rep
}

// ---------- fixed examples ----------

#[test]
fn annulus_betti_by_smith_form() {
    let c = annulus(6, 2);
    let d1 = dense_boundary(&c, 1, &|_| true);
    let d2 = dense_boundary(&c, 2, &|_| true);
    let b1 = c.count(1) - snf_rank(d1) - snf_rank(d2);
    assert_eq!(b1, 1);
    assert_eq!(betti(&c, 1).unwrap(), 1);
}

#[test]
fn point_and_tetrahedron_boundary() {
    assert_eq!(betti(&point(), 0).unwrap(), 1);
    let tet = SimplicialComplex::from_top(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], &[]).unwrap();
    let d2 = dense_boundary(&tet, 2, &|_| true);
    let d3_rank = 0;
    assert_eq!(tet.count(2) - snf_rank(d2) - d3_rank, 1);
    assert_eq!(betti(&tet, 2).unwrap(), 1);
    // torsion-free: every Smith invariant is 1
    let d1 = dense_boundary(&tet, 1, &|_| true);
    assert!(smith_diagonal(d1).iter().all(|&d| d == 1));
}

#[test]
fn standard_pieces() {
    let cases = [
        ("annulus", annulus(5, 3), (1, 1, 0, 2)),
        ("ball", ball(2), (0, 0, 0, 1)),
        ("S2xI", sphere_shell(2), (0, 1, 0, 2)),
        ("T2xI", torus_shell(3, 2), (2, 1, 0, 2)),
        ("T2xI 4x4", torus_shell(4, 2), (2, 1, 0, 2)),
    ];
    for (name, c, (h1, h1c, ri, s)) in cases {
        let rep = check_against_oracle(&c);
        assert_eq!((rep.dim_h1, rep.dim_h1c, rep.rank_i, rep.s), (h1, h1c, ri, s), "{name}");
    }
}

#[test]
fn relative_examples() {
    assert_eq!(relative_h1(&annulus(4, 2)).unwrap(), 1);
    assert_eq!(relative_h1(&ball(2)).unwrap(), 0);
    let closed = SimplicialComplex::from_top(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], &[]).unwrap();
    assert!(matches!(relative_h1(&closed), Err(Error::Validation { .. })));
    assert!(ends_count(&closed).is_err());
}

#[test]
fn ends_examples() {
    assert_eq!(ends_count(&annulus(3, 1)).unwrap(), 2);
    assert_eq!(ends_count(&ball(1)).unwrap(), 1);
    // two tori and a sphere as boundary of one connected complex
    let t = torus_shell(3, 2);
    let s = sphere_shell(2);
    let off = t.n_vertices;
    let mut top: Vec<Simplex> = t.all_simplices();
    top.extend(s.all_simplices().into_iter().map(|x| x.iter().map(|v| v + off).collect()));
    // bridge between interior vertices (middle layers)
    top.push(vec![9, off + 4]);
    let mut bnd: Vec<Simplex> = t.boundary_simplices(2);
    bnd.extend(s.boundary_simplices(2).into_iter().filter(|x| x[0] < 4).map(|x| x.iter().map(|v| v + off).collect()));
    let glued = SimplicialComplex::from_top(&top, &bnd).unwrap();
    assert_eq!(ends_count(&glued).unwrap(), 3);
    check_against_oracle(&glued);
}

#[test]
fn disconnected_complex_rejected() {
    let a = annulus(3, 1);
    let off = a.n_vertices;
    let mut top = a.all_simplices();
    top.extend(a.all_simplices().into_iter().map(|x| x.iter().map(|v| v + off).collect()));
    let bnd = a.boundary_simplices(1);
    let c = SimplicialComplex::from_top(&top, &bnd).unwrap();
    assert!(matches!(cohomology_report(&c), Err(Error::Validation { .. })));
}

#[test]
fn euler_characteristic_matches_betti() {
    for c in [annulus(4, 2), ball(2), sphere_shell(1), torus_shell(3, 1)] {
        let b: Vec<i64> = (0..=3).map(|k| betti(&c, k).unwrap() as i64).collect();
        assert_eq!(b[0] - b[1] + b[2] - b[3], c.euler_characteristic());
    }
}

#[test]
fn barycentric_subdivision_preserves_betti() {
    let tet = SimplicialComplex::from_top(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], &[vec![0]]).unwrap();
    for c in [annulus(4, 1), tet] {
        let sd = barycentric(&c);
        assert!(sd.count(0) > c.count(0));
        for k in 0..=3 {
            assert_eq!(betti(&c, k).unwrap(), betti(&sd, k).unwrap());
        }
        assert_eq!(relative_h1(&c).unwrap(), relative_h1(&sd).unwrap());
        assert_eq!(ends_count(&c).unwrap(), ends_count(&sd).unwrap());
    }
}

#[test]
fn random_glued_complexes_satisfy_exact_sequence() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    for _ in 0..50 {
        let c = random_glued(&mut rng);
        check_against_oracle(&c);
    }
}

#[test]
fn text_format_roundtrip_and_errors() {
    let c = torus_shell(3, 1);
    let text = write_complex(&c);
    assert_eq!(parse_complex(&text).unwrap(), c);

    let missing = "0\n1\n2\n0 1\n1 2\n0 1 2\n%boundary\n0\n";
    match parse_complex(missing) {
        Err(Error::Validation { message, .. }) => assert!(message.contains("[0, 2]")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_complex("0\nx 1\n"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_complex("0 1 2 3 4\n"), Err(Error::Parse { .. })));
}

#[test]
fn fixture_files() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    for (file, want) in [("annulus.cplx", (1, 1, 2)), ("ball.cplx", (0, 0, 1)), ("s2xi.cplx", (0, 1, 2)), ("t2xi.cplx", (2, 1, 2))] {
        let c = read_complex(&std::path::Path::new(dir).join(file)).unwrap();
        let r = cohomology_report(&c).unwrap();
        assert_eq!((r.dim_h1, r.dim_h1c, r.s), want, "{file}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn exact_sequence_on_random_assemblies(seed in any::<u64>()) {
        let c = random_glued(&mut ChaCha8Rng::seed_from_u64(seed));
        let rep = cohomology_report(&c).unwrap();
        prop_assert_eq!(rep.dim_h1c, rep.rank_i + rep.s - 1);
        let b = &rep.betti;
        prop_assert_eq!(b[0] as i64 - b[1] as i64 + b[2] as i64 - b[3] as i64, rep.euler_characteristic);
    }
}
