//! Exact integer linear algebra: rank over Q by fraction-free (Bareiss)
//! elimination, and integer kernels by unimodular column reduction. Entries
//! here are exponent differences and action exponents, so i128 intermediates
//! are ample.

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Rank over Q of an integer matrix, by Bareiss fraction-free elimination.
pub fn rank_q(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let nrows = a.len();
    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    let mut col = 0;
    while rank < nrows && col < ncols {
        // find a pivot in this column at or below `rank`
        let pivot_row = (rank..nrows).find(|&r| a[r][col] != 0);
        let Some(pr) = pivot_row else {
            col += 1;
            continue;
        };
        a.swap(rank, pr);
        let pivot = a[rank][col];
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                a[r][c] = (a[r][c] * pivot - a[r][col] * a[rank][c]) / prev_pivot;
            }
            a[r][col] = 0;
        }
        prev_pivot = pivot;
        rank += 1;
        col += 1;
    }
    rank
}

/// Z-basis of the integer kernel { v in Z^n : A v = 0 } of an r x n matrix.
///
/// Columns are reduced by unimodular operations (tracked in a transform U);
/// the U-columns over the zeroed-out part of the echelon form generate the
/// full saturated kernel, so every integer solution is a Z-combination of the
/// returned vectors.
pub fn integer_kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols);
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let nrows = a.len();
    // u[c] is the current c-th generator of Z^n
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|c| (0..ncols).map(|i| i128::from(i == c)).collect())
        .collect();
    let mut active: Vec<bool> = vec![true; ncols];

    let col_op = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, p: usize, q: usize,
                  m11: i128, m12: i128, m21: i128, m22: i128| {
        for r in 0..a.len() {
            let (vp, vq) = (a[r][p], a[r][q]);
            a[r][p] = m11 * vp + m21 * vq;
            a[r][q] = m12 * vp + m22 * vq;
        }
        for i in 0..u[0].len() {
            let (vp, vq) = (u[p][i], u[q][i]);
            u[p][i] = m11 * vp + m21 * vq;
            u[q][i] = m12 * vp + m22 * vq;
        }
    };

    for row in 0..nrows {
        // concentrate the nonzero entries of this row (among active columns)
        // into a single pivot column, then retire it
        let mut pivot: Option<usize> = None;
        for c in 0..ncols {
            if !active[c] || a[row][c] == 0 {
                continue;
            }
            match pivot {
                None => pivot = Some(c),
                Some(p) => {
                    let (av, bv) = (a[row][p], a[row][c]);
                    let (g, x, y) = egcd(av, bv);
                    // [[x, -b/g], [y, a/g]] has determinant 1
                    col_op(&mut a, &mut u, p, c, x, -bv / g, y, av / g);
                    debug_assert_eq!(a[row][p], g);
                    debug_assert_eq!(a[row][c], 0);
                }
            }
        }
        if let Some(p) = pivot {
            active[p] = false;
        }
    }

    let mut kernel: Vec<Vec<i64>> = Vec::new();
    for c in 0..ncols {
        if !active[c] {
            continue;
        }
        debug_assert!((0..nrows).all(|r| a[r][c] == 0));
        let mut v: Vec<i128> = u[c].clone();
        // normalise: primitive, first nonzero entry positive
        let g = v.iter().fold(0i128, |acc, &x| gcd(acc, x));
        if g > 1 {
            for x in v.iter_mut() {
                *x /= g;
            }
        }
        if let Some(&lead) = v.iter().find(|&&x| x != 0) {
            if lead < 0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
        }
        kernel.push(
            v.into_iter()
                .map(|x| i64::try_from(x).expect("kernel entry overflow"))
                .collect(),
        );
    }
    kernel
}


/// Tests whether `v` is an integer combination of `basis` (each of length n).
/// Solves the linear system exactly over Q by Gauss elimination on rational
/// pairs, then checks integrality of the solution.
pub fn in_integer_span(basis: &[Vec<i64>], v: &[i64]) -> bool {
    let n = v.len();
    let k = basis.len();
    if k == 0 {
        return v.iter().all(|&x| x == 0);
    }
    // augmented n x (k+1) system over i128 rationals, fraction-free
    let mut m: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            let mut row: Vec<i128> = basis.iter().map(|b| b[i] as i128).collect();
            row.push(v[i] as i128);
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..n).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let p = m[r][c];
        for i in 0..n {
            if i == r || m[i][c] == 0 {
                continue;
            }
            let q = m[i][c];
            let g = gcd(p, q);
            let (fp, fq) = (p / g, q / g);
            for j in 0..=k {
                m[i][j] = m[i][j] * fp - m[r][j] * fq;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == n {
            break;
        }
    }
    // consistency: zero rows must have zero rhs
    for i in r..n {
        if m[i][k] != 0 {
            return false;
        }
    }
    // integrality of each solved coefficient
    for &(pr, pc) in &pivots {
        if m[pr][k] % m[pr][pc] != 0 {
            return false;
        }
    }
    true
}
