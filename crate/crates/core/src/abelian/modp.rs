use super::AbelianError;
use crate::presentation::Presentation;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Basis of `{x in F_p^ncols : rows · x = 0}` in reduced form: the basis
/// vector for free column `f` has a 1 in position `f` and zeros at the
/// other free columns.
pub fn nullspace_mod_p(rows: &[Vec<i64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let pi = p as i64;
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(pi) as u64).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, k);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..a.len() {
            if i == r || a[i][c] == 0 {
                continue;
            }
            let f = a[i][c];
            for j in 0..ncols {
                a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[row][f]) % p;
            }
            v
        })
        .collect()
}

/// Basis of `Hom(G, Z/p)`, each homomorphism given by its generator images.
pub fn hom_space_mod_p(g: &Presentation, p: u64) -> Result<Vec<Vec<u64>>, AbelianError> {
    if !is_prime(p) {
        return Err(AbelianError::NotPrime(p));
    }
    Ok(nullspace_mod_p(&g.relator_vectors(), g.generator_count(), p))
}
