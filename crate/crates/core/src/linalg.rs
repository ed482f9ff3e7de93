//! Dense linear algebra over the prime field `F_p`.

/// Rank of a matrix over `F_p`.
///
/// Fraction-free elimination: the pivot is the first nonzero entry met when
/// scanning the not-yet-used rows in row-major order, and every other unused
/// row `r` is replaced by `pivot * r - r[col] * pivot_row`. No inverses are
/// taken, so the procedure is exact and its pivot sequence is reproducible.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v % p).collect())
        .collect();
    let mut used = vec![false; m.len()];
    let mut rank = 0;
    loop {
        let pivot = (0..m.len())
            .filter(|&i| !used[i])
            .find_map(|i| m[i].iter().position(|&v| v != 0).map(|c| (i, c)));
        let Some((pr, pc)) = pivot else { break };
        used[pr] = true;
        rank += 1;
        let prow = m[pr].clone();
        let pv = prow[pc] as u128;
        for (i, row) in m.iter_mut().enumerate() {
            if used[i] || row[pc] == 0 {
                continue;
            }
            let a = row[pc] as u128;
            for (x, &y) in row.iter_mut().zip(&prow) {
                let lhs = pv * *x as u128 % p as u128;
                let rhs = a * y as u128 % p as u128;
                *x = ((lhs + p as u128 - rhs) % p as u128) as u64;
            }
        }
    }
    rank
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (a % p) as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// Solution set `particular + span(kernel)` of a linear system over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolutions {
    pub particular: Vec<u64>,
    pub kernel: Vec<Vec<u64>>,
    p: u64,
}

impl AffineSolutions {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    /// Visits every solution; the kernel coefficients run through `F_p^dim`
    /// lexicographically.
    pub fn for_each(&self, mut f: impl FnMut(&[u64])) {
        let n = self.particular.len();
        let d = self.kernel.len();
        let mut coeffs = vec![0u64; d];
        let mut v = vec![0u64; n];
        loop {
            for (j, slot) in v.iter_mut().enumerate() {
                let mut acc = self.particular[j] as u128;
                for (c, b) in coeffs.iter().zip(&self.kernel) {
                    acc += *c as u128 * b[j] as u128;
                }
                *slot = (acc % self.p as u128) as u64;
            }
            f(&v);
            // odometer, last coefficient fastest
            let mut i = d;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                coeffs[i] += 1;
                if coeffs[i] < self.p {
                    break;
                }
                coeffs[i] = 0;
            }
        }
    }
}

/// Solves `a * v = b` over `F_p` where `a` has one row per equation.
/// Returns `None` when the system is inconsistent.
pub fn solve_mod_p(a: &[Vec<u64>], b: &[u64], ncols: usize, p: u64) -> Option<AffineSolutions> {
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r: Vec<u64> = row.iter().map(|v| v % p).collect();
            r.push(rhs % p);
            r
        })
        .collect();
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mul(*x, inv);
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&prow) {
                *x = (*x + p - mul(f, y)) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| row[ncols] != 0) {
        return None;
    }
    let mut particular = vec![0u64; ncols];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = m[i][ncols];
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = (p - m[i][fc]) % p;
            }
            v
        })
        .collect();
    Some(AffineSolutions {
        particular,
        kernel,
        p,
    })
}
