#![allow(dead_code)]

use evocons::boolfun::TruthTable;
use rand::seq::SliceRandom;
use rand::Rng;

/// `W(a) = sum_x (-1)^{f(x) + a.x}` by the double loop.
pub fn naive_walsh(f: &TruthTable) -> Vec<i64> {
    let size = f.len();
    let bits: Vec<u32> = (0..size).map(|x| u32::from(f.get(x))).collect();
    (0..size)
        .map(|a| {
            bits.iter()
                .enumerate()
                .map(|(x, &b)| if (b + (a & x).count_ones()) % 2 == 0 { 1 } else { -1 })
                .sum()
        })
        .collect()
}

/// Minimum Hamming distance to any affine function, counted directly.
pub fn naive_nl(f: &TruthTable) -> u64 {
    let size = f.len();
    let bits: Vec<bool> = (0..size).map(|x| f.get(x)).collect();
    (0..size)
        .map(|a| {
            let d = bits.iter().enumerate().filter(|&(x, &b)| b != ((a & x).count_ones() % 2 == 1)).count() as u64;
            d.min(size as u64 - d)
        })
        .min()
        .expect("non-empty")
}

pub fn weight(f: &TruthTable) -> usize {
    (0..f.len()).filter(|&x| f.get(x)).count()
}

/// Uniformly sampled bent function on 4 variables (rejection sampling).
pub fn random_bent4<R: Rng>(rng: &mut R) -> TruthTable {
    loop {
        let f = TruthTable::from_fn(4, |_| rng.gen()).unwrap();
        if naive_nl(&f) == 6 {
            return f;
        }
    }
}

/// `x_4 + b(x_0..x_3)` with `b` bent: balanced, nonlinearity 12.
pub fn balanced_nl12_n5<R: Rng>(rng: &mut R) -> TruthTable {
    let b = random_bent4(rng);
    TruthTable::from_fn(5, |x| b.get(x & 15) ^ (x >> 4 == 1)).unwrap()
}

/// `x_6 + x.pi(y) + g(y)` over `x, y` in 3 bits: balanced, nonlinearity 56.
pub fn balanced_nl56_n7<R: Rng>(rng: &mut R) -> TruthTable {
    let mut pi: Vec<usize> = (0..8).collect();
    pi.shuffle(rng);
    let g: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
    TruthTable::from_fn(7, |z| {
        let (x, y) = (z & 7, (z >> 3) & 7);
        ((x & pi[y]).count_ones() % 2 == 1) ^ g[y] ^ (z >> 6 == 1)
    })
    .unwrap()
}
