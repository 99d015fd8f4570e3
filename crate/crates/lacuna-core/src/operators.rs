//! The modulated singular-integral calculus on tiles: the truncated operator
//! T, its per-tile pieces T_P, adjoint sums over tile families, interval
//! averaging Λ_I, the almost-constant approximants on trees, the tree square
//! function, and the level-shell residual operator.
//!
//! All integrals are uniform Riemann sums with weight 1/N; the kernel sum is
//! truncated to the clamped tile levels [5, m-5].

use crate::dyadic::DyadicInterval;
use crate::grid::GridFunction;
use crate::kernel::KernelBump;
use crate::lacunary::FrequencySelector;
use crate::levelset::LevelSets;
use crate::tile::{e_set, max_tile_level, Tile, Tree, MIN_TILE_LEVEL};
use crate::util::pairwise_sum_by_c64;
use num_complex::Complex64;

/// Kernel tables and phase roots bound to one grid and selector.
pub struct TileOperator<'a> {
    m: u32,
    n: usize,
    selector: &'a FrequencySelector,
    /// psi_k table per level (level - MIN_TILE_LEVEL), indexed by (x-y) mod N
    tables: Vec<Vec<f64>>,
    /// nonzero entries of the summed kernel as (signed offset, weight)
    summed_support: Vec<(i64, f64)>,
    /// per-level nonzero offsets (signed)
    level_offsets: Vec<Vec<i64>>,
    /// roots[t] = exp(+2πi t / N)
    roots: Vec<Complex64>,
}

impl<'a> TileOperator<'a> {
    pub fn new(selector: &'a FrequencySelector) -> Self {
        let m = selector.m();
        let n = 1usize << m;
        let mut tables = Vec::new();
        let mut level_offsets = Vec::new();
        for level in MIN_TILE_LEVEL..=max_tile_level(m) {
            let table = KernelBump::psi_k_table(m, level);
            let w = 1i64 << (m - level);
            let mut offsets = Vec::new();
            for s in -8 * w..=8 * w {
                if table[s.rem_euclid(n as i64) as usize] != 0.0 {
                    offsets.push(s);
                }
            }
            tables.push(table);
            level_offsets.push(offsets);
        }
        let mut summed = vec![0.0f64; n];
        for t in &tables {
            for (acc, v) in summed.iter_mut().zip(t) {
                *acc += v;
            }
        }
        let summed_support: Vec<(i64, f64)> = {
            let w = 1i64 << (m - MIN_TILE_LEVEL);
            (-8 * w..=8 * w)
                .filter_map(|s| {
                    let v = summed[s.rem_euclid(n as i64) as usize];
                    (v != 0.0).then_some((s, v))
                })
                .collect()
        };
        let roots = (0..n)
            .map(|t| {
                Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / n as f64)
            })
            .collect();
        Self { m, n, selector, tables, summed_support, level_offsets, roots }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn selector(&self) -> &FrequencySelector {
        self.selector
    }

    fn table(&self, level: u32) -> &[f64] {
        &self.tables[(level - MIN_TILE_LEVEL) as usize]
    }

    fn offsets(&self, level: u32) -> &[i64] {
        &self.level_offsets[(level - MIN_TILE_LEVEL) as usize]
    }

    /// Phase exp(+2πi a / N) for any integer a.
    fn root(&self, a: i64) -> Complex64 {
        self.roots[a.rem_euclid(self.n as i64) as usize]
    }

    /// T f(x) = (1/N) Σ_y [Σ_k ψ_k(x-y)] e^{-2πi N(x) y} f(y).
    pub fn apply_t(&self, f: &GridFunction) -> GridFunction {
        assert_eq!(f.m(), self.m);
        let n = self.n as i64;
        let inv_n = 1.0 / self.n as f64;
        let samples: Vec<Complex64> = (0..self.n)
            .map(|x| {
                let nx = self.selector.value_at(x) as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for &(s, w) in &self.summed_support {
                    let y = (x as i64 - s).rem_euclid(n);
                    acc += w * self.root(-nx * y) * f.samples()[y as usize];
                }
                acc * inv_n
            })
            .collect();
        GridFunction::new_unchecked(self.m, samples)
    }

    /// T_P f = (the level-k modulated piece) masked to E(P).
    pub fn apply_t_p(&self, f: &GridFunction, tile: &Tile) -> GridFunction {
        assert_eq!(f.m(), self.m);
        let n = self.n as i64;
        let inv_n = 1.0 / self.n as f64;
        let table = self.table(tile.level());
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for x in e_set(tile, self.selector) {
            let nx = self.selector.value_at(x) as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for &s in self.offsets(tile.level()) {
                let y = (x as i64 - s).rem_euclid(n);
                acc += table[s.rem_euclid(n) as usize]
                    * self.root(-nx * y)
                    * f.samples()[y as usize];
            }
            out[x] = acc * inv_n;
        }
        GridFunction::new_unchecked(self.m, out)
    }

    /// Accumulate T_P* g (with frequencies shifted down by `freq_offset`)
    /// into `acc`: acc(y) += (1/N) Σ_{x ∈ E(P)} e^{+2πi (N(x)-c) y} ψ_k(x-y) g(x).
    fn adjoint_accumulate(
        &self,
        g: &GridFunction,
        tile: &Tile,
        freq_offset: i64,
        acc: &mut [Complex64],
    ) {
        let n = self.n as i64;
        let inv_n = 1.0 / self.n as f64;
        let table = self.table(tile.level());
        for x in e_set(tile, self.selector) {
            let nu = self.selector.value_at(x) as i64 - freq_offset;
            let gx = g.samples()[x] * inv_n;
            for &s in self.offsets(tile.level()) {
                let y = (x as i64 - s).rem_euclid(n);
                acc[y as usize] += table[s.rem_euclid(n) as usize] * self.root(nu * y) * gx;
            }
        }
    }

    /// Σ_{P ∈ family} T_P* g, the exact discrete adjoint of the family sum.
    pub fn apply_t_star_family<'t>(
        &self,
        g: &GridFunction,
        family: impl IntoIterator<Item = &'t Tile>,
    ) -> GridFunction {
        assert_eq!(g.m(), self.m);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        for tile in family {
            self.adjoint_accumulate(g, tile, 0, &mut acc);
        }
        GridFunction::new_unchecked(self.m, acc)
    }

    /// Adjoint over one tree with its frequencies demodulated to the origin.
    pub fn tree_adjoint_demodulated(&self, g: &GridFunction, tree: &Tree) -> GridFunction {
        assert_eq!(g.m(), self.m);
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        for tile in &tree.tiles {
            self.adjoint_accumulate(g, tile, tree.freq as i64, &mut acc);
        }
        GridFunction::new_unchecked(self.m, acc)
    }

    /// The almost-constant approximant on a grouped family: for each maximal
    /// tree, modulate back the I_{P_O}-average of the demodulated adjoint.
    /// Supported in I_{P_O}.
    pub fn t_c_approximant(
        &self,
        g: &GridFunction,
        p_o: &DyadicInterval,
        trees: &[Tree],
    ) -> GridFunction {
        assert_eq!(g.m(), self.m);
        let range = p_o.sample_range(self.m);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for tree in trees {
            let demod = self.tree_adjoint_demodulated(g, tree);
            let mean = pairwise_sum_by_c64(range.start, range.end, |i| demod.samples()[i])
                / range.len() as f64;
            let c = tree.freq as i64;
            for y in range.clone() {
                out[y] += self.root(c * y as i64) * mean;
            }
        }
        GridFunction::new_unchecked(self.m, out)
    }

    /// Pointwise ℓ² aggregation of the tree adjoints: {Σ_l |T^{tree_l}* g|²}^{1/2}.
    pub fn square_function(&self, g: &GridFunction, trees: &[Tree]) -> GridFunction {
        assert_eq!(g.m(), self.m);
        let mut acc = vec![0.0f64; self.n];
        for tree in trees {
            let mut one = vec![Complex64::new(0.0, 0.0); self.n];
            for tile in &tree.tiles {
                self.adjoint_accumulate(g, tile, 0, &mut one);
            }
            for (a, z) in acc.iter_mut().zip(&one) {
                *a += z.norm_sqr();
            }
        }
        GridFunction::new_unchecked(
            self.m,
            acc.into_iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect(),
        )
    }

    /// The level-k shell residual T_k* g = Σ_P χ_P^k T_P* g, where χ_P^k
    /// masks outputs to arm cells contained in Ī_k and missing Ī_{k-1}.
    pub fn residual_t_k(
        &self,
        g: &GridFunction,
        k: u32,
        level_sets: &LevelSets,
    ) -> GridFunction {
        assert_eq!(g.m(), self.m);
        assert!(k <= level_sets.k_max());
        let n = self.n as i64;
        let inv_n = 1.0 / self.n as f64;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        for level in MIN_TILE_LEVEL..=max_tile_level(self.m) {
            let cells = 1u64 << level;
            let shell_ok: Vec<bool> = (0..cells)
                .map(|idx| {
                    let cell = DyadicInterval::space(level, idx);
                    level_sets.union_contains_cell(k, &cell)
                        && (k == 0 || level_sets.union_disjoint_from_cell(k - 1, &cell))
                })
                .collect();
            if shell_ok.iter().all(|&b| !b) {
                continue;
            }
            let table = self.table(level);
            let shift = self.m - level;
            for x in 0..self.n {
                let nx = self.selector.value_at(x) as i64;
                let gx = g.samples()[x] * inv_n;
                if gx == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for &s in self.offsets(level) {
                    let y = (x as i64 - s).rem_euclid(n) as usize;
                    if shell_ok[y >> shift] {
                        acc[y] += table[s.rem_euclid(n) as usize] * self.root(nx * y as i64) * gx;
                    }
                }
            }
        }
        GridFunction::new_unchecked(self.m, acc)
    }
}

/// Λ_I g = (mean of g over I) · χ_I.
pub fn lambda_proj(g: &GridFunction, interval: &DyadicInterval) -> GridFunction {
    let m = g.m();
    let range = interval.sample_range(m);
    let mean =
        pairwise_sum_by_c64(range.start, range.end, |i| g.samples()[i]) / range.len() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    for y in range {
        out[y] = mean;
    }
    GridFunction::new_unchecked(m, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::i_star;
    use crate::grid::inner;
    use crate::lacunary::LacunarySequence;
    use crate::tile::all_tiles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn random_grid(m: u32, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..1usize << m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridFunction::from_samples(m, samples).unwrap()
    }

    fn random_selector(m: u32, seed: u64) -> FrequencySelector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = LacunarySequence::new(2, (m - 2) as usize).unwrap().values();
        FrequencySelector::from_values(
            m,
            (0..1usize << m).map(|_| values[rng.gen_range(0..values.len())]).collect(),
        )
        .unwrap()
    }

    /// Straight double-loop oracle for T with the kernel re-derived from ψ.
    fn apply_t_oracle(f: &GridFunction, sel: &FrequencySelector) -> Vec<Complex64> {
        let m = f.m();
        let n = 1usize << m;
        (0..n)
            .map(|x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..n {
                    let d = KernelBump::torus_dist(m, (x + n - y) % n);
                    let w: f64 =
                        (MIN_TILE_LEVEL..=max_tile_level(m)).map(|k| KernelBump::psi_k(k, d)).sum();
                    if w == 0.0 {
                        continue;
                    }
                    let phase = -TAU * sel.value_at(x) as f64 * y as f64 / n as f64;
                    acc += w * Complex64::from_polar(1.0, phase) * f.samples()[y];
                }
                acc / n as f64
            })
            .collect()
    }

    #[test]
    fn t_of_zero_is_zero() {
        let sel = random_selector(10, 1);
        let op = TileOperator::new(&sel);
        assert!(op.apply_t(&GridFunction::zeros(10)).is_zero());
    }

    #[test]
    fn constant_selector_matches_convolution_oracle() {
        let m = 10;
        let sel = FrequencySelector::from_values(m, vec![16; 1 << m]).unwrap();
        let op = TileOperator::new(&sel);
        let f = random_grid(m, 2);
        let got = op.apply_t(&f);
        let oracle = apply_t_oracle(&f, &sel);
        for (a, b) in got.samples().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn tile_pieces_sum_to_t() {
        let m = 10;
        let sel = random_selector(m, 5);
        let op = TileOperator::new(&sel);
        let f = random_grid(m, 6);
        let total = op.apply_t(&f);
        let tiles = all_tiles(m).unwrap();
        let mut acc = GridFunction::zeros(m);
        for tile in &tiles {
            acc = acc.add(&op.apply_t_p(&f, tile));
        }
        for (a, b) in acc.samples().iter().zip(total.samples()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn tile_piece_respects_support_and_empty_e_set() {
        let m = 10;
        let sel = FrequencySelector::from_values(m, vec![1; 1 << m]).unwrap();
        let op = TileOperator::new(&sel);
        let f = random_grid(m, 7);
        // ω misses the selector value: E(P) empty, output zero
        let empty = Tile::new(5, 3, 2);
        assert!(op.apply_t_p(&f, &empty).is_zero());
        // E(P) full: output vanishes off I_P exactly
        let tile = Tile::new(5, 3, 0);
        let out = op.apply_t_p(&f, &tile);
        let range = tile.space.sample_range(m);
        for (i, z) in out.samples().iter().enumerate() {
            if !range.contains(&i) {
                assert_eq!(*z, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn tile_piece_matches_quadrature_oracle() {
        let m = 10;
        let n = 1usize << m;
        let sel = random_selector(m, 8);
        let op = TileOperator::new(&sel);
        let f = random_grid(m, 9);
        let tile = Tile::new(5, 11, 1);
        let got = op.apply_t_p(&f, &tile);
        let e = crate::tile::e_set(&tile, &sel);
        for x in 0..n {
            if !e.contains(&x) {
                assert_eq!(got.samples()[x], Complex64::new(0.0, 0.0));
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..n {
                let d = KernelBump::torus_dist(m, (x + n - y) % n);
                let w = KernelBump::psi_k(tile.level(), d);
                if w == 0.0 {
                    continue;
                }
                let phase = -TAU * sel.value_at(x) as f64 * y as f64 / n as f64;
                acc += w * Complex64::from_polar(1.0, phase) * f.samples()[y];
            }
            assert!((got.samples()[x] - acc / n as f64).norm() < 1e-11);
        }
    }

    #[test]
    fn adjointness_on_random_pairs() {
        let m = 10;
        let sel = random_selector(m, 10);
        let op = TileOperator::new(&sel);
        let tiles = all_tiles(m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..50 {
            let tile = tiles[rng.gen_range(0..tiles.len())];
            let f = random_grid(m, 100 + trial);
            let g = random_grid(m, 200 + trial);
            let lhs = inner(&op.apply_t_p(&f, &tile), &g);
            let rhs = inner(&f, &op.apply_t_star_family(&g, [&tile]));
            let scale = crate::grid::lp_norm(&f, 2.0).unwrap()
                * crate::grid::lp_norm(&g, 2.0).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1e-30), "trial {trial}");
        }
    }

    #[test]
    fn adjoint_family_support_is_contained_in_arm_union() {
        let m = 10;
        let sel = random_selector(m, 13);
        let op = TileOperator::new(&sel);
        let g = random_grid(m, 14);
        let tiles = [Tile::new(5, 4, 1), Tile::new(5, 21, 3)];
        let out = op.apply_t_star_family(&g, tiles.iter());
        let mut allowed = vec![false; 1 << m];
        for tile in &tiles {
            for arm in i_star(tile) {
                for s in arm.sample_range(m) {
                    allowed[s] = true;
                }
            }
        }
        for (i, z) in out.samples().iter().enumerate() {
            if !allowed[i] {
                assert_eq!(*z, Complex64::new(0.0, 0.0), "sample {i}");
            }
        }
        // empty family
        let empty = op.apply_t_star_family(&g, std::iter::empty());
        assert!(empty.is_zero());
    }

    #[test]
    fn lambda_proj_behaves_like_an_orthogonal_projection() {
        let m = 8;
        let interval = DyadicInterval::space(3, 2);
        // constants restrict to c χ_I
        let c = Complex64::new(0.3, -0.7);
        let g = GridFunction::constant(m, c);
        let out = lambda_proj(&g, &interval);
        for (i, z) in out.samples().iter().enumerate() {
            let expect = if interval.sample_range(m).contains(&i) { c } else { Complex64::new(0.0, 0.0) };
            assert!((z - expect).norm() < 1e-15);
        }
        // mean-zero input dies
        let mut vals = vec![Complex64::new(0.0, 0.0); 1 << m];
        let range = interval.sample_range(m);
        vals[range.start] = Complex64::new(1.0, 0.0);
        vals[range.start + 1] = Complex64::new(-1.0, 0.0);
        let h = GridFunction::from_samples(m, vals).unwrap();
        assert!(lambda_proj(&h, &interval).is_zero());
        // idempotent + self-adjoint on random data
        let f = random_grid(m, 15);
        let g2 = random_grid(m, 16);
        let once = lambda_proj(&f, &interval);
        let twice = lambda_proj(&once, &interval);
        for (a, b) in once.samples().iter().zip(twice.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
        let lhs = inner(&lambda_proj(&f, &interval), &g2);
        let rhs = inner(&f, &lambda_proj(&g2, &interval));
        assert!((lhs - rhs).norm() < 1e-12);
        // mean matches the direct sum
        let direct: Complex64 = interval
            .sample_range(m)
            .map(|i| f.samples()[i])
            .sum::<Complex64>()
            / interval.sample_range(m).len() as f64;
        assert!((once.samples()[interval.sample_range(m).start] - direct).norm() < 1e-12);
    }

    #[test]
    fn t_c_is_the_modulated_tree_average() {
        let m = 10;
        let sel = random_selector(m, 17);
        let op = TileOperator::new(&sel);
        let g = random_grid(m, 18);
        let p_o = DyadicInterval::space(6, 40);
        let tree_tiles = [Tile::new(5, 22, 1)];
        let trees = crate::tile::decompose_trees(&tree_tiles);
        let out = op.t_c_approximant(&g, &p_o, &trees);
        let demod = op.tree_adjoint_demodulated(&g, &trees[0]);
        let range = p_o.sample_range(m);
        let mean: Complex64 =
            range.clone().map(|i| demod.samples()[i]).sum::<Complex64>() / range.len() as f64;
        let n = 1usize << m;
        for y in 0..n {
            let expect = if range.contains(&y) {
                Complex64::from_polar(
                    1.0,
                    TAU * (trees[0].freq as f64) * y as f64 / n as f64,
                ) * mean
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert!((out.samples()[y] - expect).norm() < 1e-11);
        }
        // zero input gives zero
        assert!(op.t_c_approximant(&GridFunction::zeros(m), &p_o, &trees).is_zero());
    }

    #[test]
    fn tree_modulation_identity_holds() {
        // T^{tree*} g = e^{+2πi c_l ·} (demodulated adjoint)
        let m = 12;
        let sel = random_selector(m, 19);
        let op = TileOperator::new(&sel);
        let g = random_grid(m, 20);
        let family = [Tile::new(5, 9, 1), Tile::new(6, 20, 2)];
        let trees = crate::tile::decompose_trees(&family);
        let n = 1usize << m;
        for tree in &trees {
            let plain = op.apply_t_star_family(&g, tree.tiles.iter());
            let demod = op.tree_adjoint_demodulated(&g, tree);
            for y in 0..n {
                let phase =
                    Complex64::from_polar(1.0, TAU * tree.freq as f64 * y as f64 / n as f64);
                assert!((plain.samples()[y] - phase * demod.samples()[y]).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn square_function_examples() {
        let m = 10;
        let sel = random_selector(m, 21);
        let op = TileOperator::new(&sel);
        let g = random_grid(m, 22);
        let family = [Tile::new(5, 9, 1), Tile::new(5, 9, 3)];
        let trees = crate::tile::decompose_trees(&family);
        assert_eq!(trees.len(), 2);
        let sq = op.square_function(&g, &trees);
        let one = op.apply_t_star_family(&g, trees[0].tiles.iter());
        let two = op.apply_t_star_family(&g, trees[1].tiles.iter());
        for i in 0..1usize << m {
            let expect =
                (one.samples()[i].norm_sqr() + two.samples()[i].norm_sqr()).sqrt();
            assert!((sq.samples()[i].re - expect).abs() < 1e-11);
        }
        // single tree reduces to |T* g|
        let single = op.square_function(&g, &trees[..1]);
        for i in 0..1usize << m {
            assert!((single.samples()[i].re - one.samples()[i].norm()).abs() < 1e-12);
        }
        assert!(op.square_function(&GridFunction::zeros(m), &trees).is_zero());
    }

    #[test]
    fn residual_matches_per_tile_mask_oracle() {
        let m = 10;
        let n = 1usize << m;
        let sel = random_selector(m, 23);
        let op = TileOperator::new(&sel);
        let g = random_grid(m, 24);
        let mut mask = vec![false; n];
        for b in mask.iter_mut().take(64) {
            *b = true;
        }
        let f = GridFunction::indicator(m, &mask).unwrap();
        let level_sets = crate::levelset::level_intervals(&f, 0.25).unwrap();
        let tiles = all_tiles(m).unwrap();
        for k in 0..=level_sets.k_max() {
            let got = op.residual_t_k(&g, k, &level_sets);
            // oracle: per-tile adjoint, masked per arm cell by the raw shell rule
            let mut oracle = vec![Complex64::new(0.0, 0.0); n];
            for tile in &tiles {
                let adj = op.apply_t_star_family(&g, [tile]);
                for arm in i_star(tile) {
                    let ok = level_sets.union_contains_cell(k, &arm)
                        && (k == 0 || level_sets.union_disjoint_from_cell(k - 1, &arm));
                    if !ok {
                        continue;
                    }
                    for y in arm.sample_range(m) {
                        oracle[y] += adj.samples()[y];
                    }
                }
            }
            for y in 0..n {
                assert!((got.samples()[y] - oracle[y]).norm() < 1e-9, "k={k} y={y}");
            }
        }
        // zero input
        assert!(op.residual_t_k(&GridFunction::zeros(m), 0, &level_sets).is_zero());
    }
}
