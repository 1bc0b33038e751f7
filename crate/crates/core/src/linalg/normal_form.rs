//! Hermite and Smith normal forms over the integers.
//!
//! Conventions: the Hermite form is row-style. Pivots move strictly right
//! going down, every pivot is positive, entries above a pivot lie in
//! `[0, pivot)`, and zero rows sit at the bottom. This form is the canonical
//! representative of a lattice (its row span) and subgroup equality is
//! defined through it.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Returns `(h, u)` with `h = u · m`, `u` unimodular and `h` in row-style
/// Hermite normal form.
pub fn hermite_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    hermite_in_place(&mut h, Some(&mut u));
    (h, u)
}

/// Hermite form without the transform.
pub fn hermite_basis(m: &IntMatrix) -> IntMatrix {
    let mut h = m.clone();
    hermite_in_place(&mut h, None);
    h
}

fn hermite_in_place(h: &mut IntMatrix, mut u: Option<&mut IntMatrix>) {
    let (rows, cols) = (h.rows(), h.cols());
    let mut r = 0;
    for j in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let best =
                (r..rows).filter(|&i| !h[(i, j)].is_zero()).min_by(|&a, &b| h[(a, j)].abs().cmp(&h[(b, j)].abs()));
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            if let Some(u) = u.as_deref_mut() {
                u.swap_rows(r, p);
            }
            let mut clean = true;
            for i in r + 1..rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -(&h[(i, j)] / &h[(r, j)]);
                h.add_row_multiple(i, r, &q);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(i, r, &q);
                }
                if !h[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(r);
            }
        }
        for i in 0..r {
            let q = -h[(i, j)].div_floor(&h[(r, j)]);
            h.add_row_multiple(i, r, &q);
            if let Some(u) = u.as_deref_mut() {
                u.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
}

/// Returns `(s, u, v)` with `s = u · m · v` diagonal, `d_1 | d_2 | ...`,
/// every nonzero `d_i > 0`, and `u`, `v` unimodular.
pub fn smith_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&s[(i, t)] / &s[(t, t)]);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&s[(t, j)] / &s[(t, t)]);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole remaining block
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&s[(t, t)])));
            match offender {
                Some(i) => {
                    s.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Nonzero diagonal entries of the Smith form, in divisibility order.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (s, _, _) = smith_form(m);
    (0..s.rows().min(s.cols())).map(|i| s[(i, i)].clone()).filter(|d| !d.is_zero()).collect()
}

pub fn rank(m: &IntMatrix) -> usize {
    hermite_basis(m).without_zero_rows().rows()
}

/// Hermite form of the lattice spanned by the rows of `m` together with
/// `modulus · Z^cols`. The result is always `cols × cols` and full rank;
/// every pivot divides `modulus`.
///
/// Entries are kept reduced modulo `modulus` throughout, which keeps the
/// computation bounded no matter how many generators are fed in.
pub fn hermite_form_modulo(m: &IntMatrix, modulus: &BigInt) -> IntMatrix {
    assert!(modulus.sign() == Sign::Plus, "modulus must be positive");
    let cols = m.cols();
    let reduce = |row: &mut Vec<BigInt>, from: usize| {
        for x in row.iter_mut().skip(from) {
            *x = x.mod_floor(modulus);
        }
    };
    let mut work: Vec<Vec<BigInt>> = m
        .row_vecs()
        .map(|r| {
            let mut r = r.to_vec();
            reduce(&mut r, 0);
            r
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();

    let mut pivots: Vec<Vec<BigInt>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut pivot = vec![BigInt::zero(); cols];
        pivot[j] = modulus.clone();
        let mut rest = Vec::with_capacity(work.len());
        for mut w in work.drain(..) {
            if w[j].is_zero() {
                rest.push(w);
                continue;
            }
            let eg = pivot[j].extended_gcd(&w[j]);
            let (g, x, y) = if eg.gcd.is_negative() { (-eg.gcd, -eg.x, -eg.y) } else { (eg.gcd, eg.x, eg.y) };
            let a = &pivot[j] / &g;
            let b = &w[j] / &g;
            let mut next = Vec::with_capacity(cols);
            for c in 0..cols {
                let p = &pivot[c];
                let q = &w[c];
                next.push(&x * p + &y * q);
                w[c] = &a * q - &b * p;
            }
            reduce(&mut next, j + 1);
            reduce(&mut w, j + 1);
            pivot = next;
            if w.iter().any(|v| !v.is_zero()) {
                rest.push(w);
            }
        }
        work = rest;
        pivots.push(pivot);
    }

    for k in 0..cols {
        for i in 0..k {
            let q = pivots[i][k].div_floor(&pivots[k][k]);
            if q.is_zero() {
                continue;
            }
            let (top, bottom) = pivots.split_at_mut(k);
            for (c, val) in bottom[0].iter().enumerate().skip(k) {
                top[i][c] -= &q * val;
            }
        }
    }
    IntMatrix::from_rows(cols, pivots)
}

/// Integer coordinates of `v` in the row basis `basis`, which must be in
/// echelon form with no zero rows. `None` if `v` is not in the row span.
pub fn echelon_coordinates(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(basis.cols(), v.len());
    let mut rem = v.to_vec();
    let mut coords = Vec::with_capacity(basis.rows());
    for i in 0..basis.rows() {
        let row = basis.row(i);
        let p = row.iter().position(|x| !x.is_zero()).expect("zero row in echelon basis");
        if rem[..p].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (c, r) = rem[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (x, b) in rem.iter_mut().zip(row).skip(p) {
                *x -= &c * b;
            }
        }
        coords.push(c);
    }
    rem.iter().all(Zero::is_zero).then_some(coords)
}

/// Whether `m` is in the row-style Hermite form described above.
pub fn is_hermite(m: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..m.rows() {
        let row = m.row(i);
        match row.iter().position(|x| !x.is_zero()) {
            None => seen_zero = true,
            Some(p) => {
                if seen_zero || last_pivot.is_some_and(|lp| p <= lp) || !row[p].is_positive() {
                    return false;
                }
                for k in 0..i {
                    let above = &m[(k, p)];
                    if above.is_negative() || above >= &row[p] {
                        return false;
                    }
                }
                last_pivot = Some(p);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(m: &IntMatrix) -> BigInt {
        // cofactor expansion along the first row
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor = IntMatrix::from_rows(
                n - 1,
                (1..n).map(|i| (0..n).filter(|&c| c != j).map(|c| m[(i, c)].clone()).collect()).collect(),
            );
            let term = &m[(0, j)] * det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn hermite_identity() {
        let m = IntMatrix::identity(2);
        let (h, u) = hermite_form(&m);
        assert_eq!(h, m);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hermite_positive_diagonal() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 2]]);
        let (h, u) = hermite_form(&m);
        assert_eq!(h, m);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hermite_preserves_abs_det() {
        let m = IntMatrix::from_i64(&[&[4, 6], &[6, 4]]);
        let (h, u) = hermite_form(&m);
        assert!(is_hermite(&h));
        assert_eq!(&u * &m, h);
        assert_eq!(det(&u).abs(), BigInt::one());
        assert_eq!(det(&h).abs(), BigInt::from(20));
        assert_eq!(det(&m).abs(), BigInt::from(20));
    }

    #[test]
    fn smith_zero() {
        let m = IntMatrix::zeros(2, 3);
        let (s, u, v) = smith_form(&m);
        assert!(s.is_zero());
        assert_eq!(u, IntMatrix::identity(2));
        assert_eq!(v, IntMatrix::identity(3));
    }

    #[test]
    fn smith_coprime_diagonal() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let (s, u, v) = smith_form(&m);
        assert_eq!(s, IntMatrix::from_i64(&[&[1, 0], &[0, 6]]));
        assert_eq!(&(&u * &m) * &v, s);
    }

    #[test]
    fn smith_shared_factor() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let (s, u, v) = smith_form(&m);
        assert_eq!(s, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(&(&u * &m) * &v, s);
        assert_eq!(det(&u).abs(), BigInt::one());
        assert_eq!(det(&v).abs(), BigInt::one());
    }

    #[test]
    fn modular_hermite_matches_plain_hermite() {
        let m = IntMatrix::from_i64(&[&[1, 1, 0], &[0, 3, 3]]);
        let modulus = BigInt::from(6);
        let with_rel = m.stack(&IntMatrix::identity(3).scale(&modulus));
        let plain = hermite_basis(&with_rel).truncate_rows(3);
        assert_eq!(hermite_form_modulo(&m, &modulus), plain);
    }

    #[test]
    fn coordinates_outside_span() {
        let b = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert_eq!(echelon_coordinates(&b, &[BigInt::from(1), BigInt::from(0)]), None);
        assert_eq!(
            echelon_coordinates(&b, &[BigInt::from(4), BigInt::from(-3)]),
            Some(vec![BigInt::from(2), BigInt::from(-1)])
        );
    }
}
