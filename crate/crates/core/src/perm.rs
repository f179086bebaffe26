//! Permutations of `0..n` as image vectors, listed in lexicographic order.

use itertools::Itertools;

pub type Perm = Vec<usize>;

pub fn permutations(n: usize) -> Vec<Perm> {
    (0..n).permutations(n).collect()
}

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `(a · b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// The transposition of `i` and `i + 1`.
pub fn adjacent(n: usize, i: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i, i + 1);
    p
}

pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
    let mut p = identity(n);
    p.swap(i, j);
    p
}

/// Position of `p` in `permutations(p.len())`.
pub fn rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    let mut r = 0;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        r += smaller * fact[n - 1 - i];
    }
    r
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
