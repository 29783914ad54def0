//! Independent oracles shared by the integration tests. None of these call
//! into the elimination or table code they are used to check.

#![allow(dead_code)]

use nps_core::gfield::FieldSpec;

/// Schoolbook product of two canonical elements reduced by `poly`
/// (monic, constant term first), coefficients mod `p`.
pub fn naive_mul(p: u32, poly: &[u32], a: u32, b: u32) -> u32 {
    let r = poly.len() - 1;
    let digits = |mut v: u32| {
        let mut d = vec![0u32; r];
        for x in d.iter_mut() {
            *x = v % p;
            v /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u32; 2 * r];
    for i in 0..r {
        for j in 0..r {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
        }
    }
    for deg in (r..2 * r).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for k in 0..r {
            let idx = deg - r + k;
            prod[idx] = (prod[idx] + (p - c) * poly[k] % p) % p;
        }
    }
    prod[..r].iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Every field axiom over all pairs and triples of elements.
pub fn check_field_axioms(f: &FieldSpec) {
    let q = f.order();
    for a in 0..q {
        assert_eq!(f.add(a, 0), a);
        assert_eq!(f.mul(a, 1), a);
        assert_eq!(f.mul(a, 0), 0);
        assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "inverse of {a}");
        }
        for b in 0..q {
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.sub(f.add(a, b), b), a);
            if a != 0 && b != 0 {
                assert_ne!(f.mul(a, b), 0, "zero divisor {a} * {b}");
            }
            for c in 0..q {
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }
    assert_eq!(f.inv(0), None);
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(vec![], true)];
    }
    let mut out = Vec::new();
    for (perm, even) in permutations(k - 1) {
        // insert k-1 at every position; moving it left by s places adds s transpositions
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            let shifts = perm.len() - pos;
            out.push((p, even == (shifts % 2 == 0)));
        }
    }
    out
}

/// Leibniz determinant over the field.
pub fn det(f: &FieldSpec, m: &[Vec<u32>]) -> u32 {
    let k = m.len();
    let mut acc = 0;
    for (perm, even) in permutations(k) {
        let term = (0..k).fold(1, |t, row| f.mul(t, m[row][perm[row]]));
        acc = if even { f.add(acc, term) } else { f.sub(acc, term) };
    }
    acc
}

/// Whether the `rows x cols` system has full column rank, by searching for a
/// nonzero maximal minor.
pub fn full_column_rank(f: &FieldSpec, m: &[Vec<u32>]) -> bool {
    let cols = m.first().map_or(0, Vec::len);
    if cols == 0 {
        return true;
    }
    if m.len() < cols {
        return false;
    }
    choose(m.len(), cols).into_iter().any(|rows| {
        let sq: Vec<Vec<u32>> = rows.iter().map(|&r| m[r].clone()).collect();
        det(f, &sq) != 0
    })
}

pub fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn is_prime_power(q: u32) -> bool {
    (2..=q).find(|d| q % d == 0).is_some_and(|p| {
        let mut x = q;
        while x % p == 0 {
            x /= p;
        }
        x == 1
    })
}

/// Smallest power of two that is at least `n + 1`.
pub fn binary_field_for(n: usize) -> u32 {
    (n as u32 + 1).next_power_of_two()
}

pub fn smallest_prime_above(n: usize) -> u32 {
    (n as u32 + 1..).find(|&q| is_prime(q)).unwrap()
}

#[test]
fn oracle_sanity() {
    let f = FieldSpec::prime(5).unwrap();
    assert_eq!(det(&f, &[vec![1, 1], vec![1, 2]]), 1);
    assert_eq!(det(&f, &[vec![1, 1], vec![2, 2]]), 0);
    // 3x3 Vandermonde on 1, 2, 3: (2-1)(3-1)(3-2) = 2
    assert_eq!(det(&f, &[vec![1, 1, 1], vec![1, 2, 3], vec![1, 4, 4]]), 2);
    assert_eq!(permutations(4).len(), 24);
    assert_eq!(naive_mul(2, &[1, 1, 0, 1], 0b010, 0b111), 0b101);
}
