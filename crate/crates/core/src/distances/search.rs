//! Correspondence search: exact branch and bound for small inputs, annealing
//! and fixed candidates for large ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::space::TimedMetricSpace;

/// Total arithmetic the search may spend on objective evaluations.
const WORK_LIMIT: f64 = 2e8;

/// Below this many affordable evaluations, only fixed candidates are scored.
const MIN_ANNEAL_EVALS: f64 = 100.0;

pub(crate) type Pairs = Vec<(usize, usize)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Gh,
    Kappa,
    TauH,
    /// Gluing objective with basepoints.
    Bb,
    /// Gluing objective with initial sets.
    Fd,
}

pub(crate) struct Problem<'a> {
    pub x: &'a TimedMetricSpace,
    pub y: &'a TimedMetricSpace,
    pub kind: Kind,
    mx: Vec<usize>,
    my: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub value: f64,
    pub pairs: Pairs,
    pub exact: bool,
    pub searched: bool,
    pub evals: u64,
}

pub(crate) fn normalize(mut pairs: Pairs) -> Pairs {
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

impl<'a> Problem<'a> {
    pub fn new(x: &'a TimedMetricSpace, y: &'a TimedMetricSpace, kind: Kind) -> Self {
        let mx = x.initial_set().map(<[usize]>::to_vec).unwrap_or_default();
        let my = y.initial_set().map(<[usize]>::to_vec).unwrap_or_default();
        Self { x, y, kind, mx, my }
    }

    fn n(&self) -> usize {
        self.x.len()
    }

    fn m(&self) -> usize {
        self.y.len()
    }

    #[inline]
    fn gap(&self, a: usize, a2: usize, b: usize, b2: usize) -> f64 {
        (self.x.dist(a, a2) - self.y.dist(b, b2)).abs()
    }

    pub fn distortion(&self, pairs: &[(usize, usize)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for &(a2, b2) in &pairs[k + 1..] {
                worst = worst.max(self.gap(a, a2, b, b2));
            }
        }
        worst
    }

    fn timed(&self) -> bool {
        self.kind == Kind::TauH
    }

    fn base_cost(&self) -> Vec<f64> {
        let (n, m) = (self.n(), self.m());
        let mut c = vec![0.0; n * m];
        if self.timed() {
            for a in 0..n {
                for b in 0..m {
                    c[a * m + b] = (self.x.tau(a) - self.y.tau(b)).abs();
                }
            }
        }
        c
    }

    fn raise_cost(&self, c: &mut [f64], a: usize, b: usize) {
        let m = self.m();
        for a2 in 0..self.n() {
            let da = self.x.dist(a, a2);
            let row = &mut c[a2 * m..(a2 + 1) * m];
            for (b2, v) in row.iter_mut().enumerate() {
                let g = (da - self.y.dist(b, b2)).abs();
                if g > *v {
                    *v = g;
                }
            }
        }
    }

    fn hausdorff(&self, c: &[f64]) -> f64 {
        let (n, m) = (self.n(), self.m());
        let mut worst: f64 = 0.0;
        for a in 0..n {
            worst = worst.max(c[a * m..(a + 1) * m].iter().copied().fold(f64::INFINITY, f64::min));
        }
        for b in 0..m {
            worst = worst.max((0..n).map(|a| c[a * m + b]).fold(f64::INFINITY, f64::min));
        }
        worst
    }

    /// Objective of a correspondence. For the basepoint objective the best
    /// extra pair is added, and returned.
    pub fn eval(&self, pairs: &[(usize, usize)]) -> (f64, Option<(usize, usize)>) {
        match self.kind {
            Kind::Gh => (self.distortion(pairs) / 2.0, None),
            Kind::Kappa | Kind::TauH => {
                let mut c = self.base_cost();
                for &(a, b) in pairs {
                    self.raise_cost(&mut c, a, b);
                }
                (self.hausdorff(&c), None)
            }
            Kind::Bb => self.eval_bb(pairs),
            Kind::Fd => (self.eval_fd(pairs), None),
        }
    }

    /// `dis(R ∪ {p}) + τ(p_x) + τ(p_y)`, minimized over `p`: the gluing
    /// Hausdorff term is `dis/2` and the basepoint distance is
    /// `dis/2 + min over R of τ(x') + τ(y')`.
    fn eval_bb(&self, pairs: &[(usize, usize)]) -> (f64, Option<(usize, usize)>) {
        let dis = self.distortion(pairs);
        let mut best = (f64::INFINITY, None);
        for a in 0..self.n() {
            for b in 0..self.m() {
                let base = self.x.tau(a) + self.y.tau(b);
                if dis + base >= best.0 {
                    continue;
                }
                let extra = pairs.iter().fold(dis, |w, &(a2, b2)| w.max(self.gap(a, a2, b, b2)));
                let v = extra + base;
                if v < best.0 {
                    best = (v, Some((a, b)));
                }
            }
        }
        best
    }

    /// `dis/2 + d_H(M_X, M_Y)` in the glued space.
    fn eval_fd(&self, pairs: &[(usize, usize)]) -> f64 {
        let r = self.distortion(pairs) / 2.0;
        let cross = |a: usize, b: usize| {
            pairs
                .iter()
                .map(|&(a2, b2)| self.x.dist(a, a2) + self.y.dist(b2, b))
                .fold(f64::INFINITY, f64::min)
                + r
        };
        let mut worst: f64 = 0.0;
        let mut col = vec![f64::INFINITY; self.my.len()];
        for &a in &self.mx {
            let mut row = f64::INFINITY;
            for (k, &b) in self.my.iter().enumerate() {
                let v = cross(a, b);
                row = row.min(v);
                col[k] = col[k].min(v);
            }
            worst = worst.max(row);
        }
        col.into_iter().fold(worst, f64::max) + r
    }

    /// Upper bound on the objective using only quantities over `R` itself.
    fn cheap_eval(&self, pairs: &[(usize, usize)]) -> f64 {
        let dis = self.distortion(pairs);
        let tau_gap = pairs
            .iter()
            .map(|&(a, b)| (self.x.tau(a) - self.y.tau(b)).abs())
            .fold(0.0, f64::max);
        match self.kind {
            Kind::Gh => dis / 2.0,
            Kind::Kappa => dis,
            Kind::TauH => dis.max(tau_gap),
            Kind::Bb => {
                dis + pairs
                    .iter()
                    .map(|&(a, b)| self.x.tau(a) + self.y.tau(b))
                    .fold(f64::INFINITY, f64::min)
            }
            Kind::Fd => dis + tau_gap,
        }
    }

    fn eval_cost(&self) -> f64 {
        let (n, m) = (self.n() as f64, self.m() as f64);
        let r = n + m;
        match self.kind {
            Kind::Gh => r * r / 2.0,
            Kind::Kappa | Kind::TauH => n * m * r,
            Kind::Bb => n * m * r + r * r,
            Kind::Fd => r * r + (self.mx.len() * self.my.len()) as f64 * r,
        }
    }

    /// Bound usable in branch and bound: never exceeds the objective of any
    /// correspondence containing the partial relation.
    fn partial_bound(&self, dis: f64, cost: Option<&[f64]>) -> f64 {
        match self.kind {
            Kind::Gh | Kind::Fd => dis / 2.0,
            Kind::Bb => dis,
            Kind::Kappa | Kind::TauH => self.hausdorff(cost.expect("cost matrix tracked")),
        }
    }

    /// Exhaustive search over minimal correspondences: every correspondence
    /// contains one of the form `{(x, f(x))} ∪ {(g(y), y) : y ∉ f(X)}`.
    pub fn exact(&self) -> Solution {
        let mut st = Bnb {
            p: self,
            pairs: Vec::new(),
            covered: vec![0; self.m()],
            best: f64::INFINITY,
            best_pairs: Vec::new(),
            leaves: 0,
            track_cost: matches!(self.kind, Kind::Kappa | Kind::TauH),
        };
        let cost = st.track_cost.then(|| self.base_cost());
        st.assign_x(0, 0.0, cost);
        Solution {
            value: st.best,
            pairs: normalize(st.best_pairs),
            exact: true,
            searched: true,
            evals: st.leaves,
        }
    }

    fn id_matched(&self) -> Option<Pairs> {
        let mut pairs = Vec::new();
        let mut hit_y = vec![false; self.m()];
        let mut hit_x = vec![false; self.n()];
        for a in 0..self.n() {
            if let Some(b) = self.y.index_of(self.x.id(a)) {
                pairs.push((a, b));
                hit_x[a] = true;
                hit_y[b] = true;
            }
        }
        if pairs.is_empty() {
            return None;
        }
        let nearest_y = |a: usize| {
            (0..self.m())
                .min_by(|&b, &c| {
                    (self.x.tau(a) - self.y.tau(b)).abs().total_cmp(&(self.x.tau(a) - self.y.tau(c)).abs())
                })
                .unwrap()
        };
        let nearest_x = |b: usize| {
            (0..self.n())
                .min_by(|&a, &c| {
                    (self.x.tau(a) - self.y.tau(b)).abs().total_cmp(&(self.x.tau(c) - self.y.tau(b)).abs())
                })
                .unwrap()
        };
        for a in 0..self.n() {
            if !hit_x[a] {
                pairs.push((a, nearest_y(a)));
            }
        }
        for b in 0..self.m() {
            if !hit_y[b] {
                pairs.push((nearest_x(b), b));
            }
        }
        Some(normalize(pairs))
    }

    /// Pairs points of equal rank after sorting both sides by `key`, in both
    /// directions so the result is a correspondence.
    fn rank_match<K: PartialOrd>(&self, key_x: impl Fn(usize) -> K, key_y: impl Fn(usize) -> K) -> Pairs {
        let sorted = |len: usize, key: &dyn Fn(usize) -> K| {
            let keys: Vec<K> = (0..len).map(key).collect();
            let mut v: Vec<usize> = (0..len).collect();
            v.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
            v
        };
        let (xs, ys) = (sorted(self.n(), &key_x), sorted(self.m(), &key_y));
        let (n, m) = (xs.len(), ys.len());
        let scale = |i: usize, from: usize, to: usize| {
            if from <= 1 {
                0
            } else {
                ((i as f64) * (to - 1) as f64 / (from - 1) as f64).round() as usize
            }
        };
        let mut pairs: Pairs = (0..n).map(|i| (xs[i], ys[scale(i, n, m)])).collect();
        pairs.extend((0..m).map(|j| (xs[scale(j, m, n)], ys[j])));
        normalize(pairs)
    }

    fn profile(s: &TimedMetricSpace, i: usize) -> (f64, Vec<f64>) {
        let mut row = s.row(i).to_vec();
        row.sort_by(f64::total_cmp);
        (s.tau(i), row)
    }

    /// Fixed starting correspondences: identical ids (if any are shared),
    /// rank in time, and rank by (time, sorted distance row).
    pub fn candidates(&self) -> Vec<Pairs> {
        let mut out = Vec::new();
        if let Some(p) = self.id_matched() {
            out.push(p);
        }
        out.push(self.rank_match(|a| self.x.tau(a), |b| self.y.tau(b)));
        if self.n() == self.m() {
            let px: Vec<_> = (0..self.n()).map(|a| Self::profile(self.x, a)).collect();
            let py: Vec<_> = (0..self.m()).map(|b| Self::profile(self.y, b)).collect();
            let cand = self.rank_match(|a| px[a].clone(), |b| py[b].clone());
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
        out
    }

    /// Best correspondence found under `budget` evaluations split over
    /// `restarts` annealing runs, or over fixed candidates when even that is
    /// too expensive.
    pub fn search(&self, budget: u64, seed: u64, restarts: usize) -> Solution {
        let cost = self.eval_cost().max(1.0);
        let affordable = (WORK_LIMIT / cost).min(budget as f64);
        let candidates = self.candidates();
        if affordable < MIN_ANNEAL_EVALS {
            let full = cost * candidates.len() as f64 <= WORK_LIMIT;
            let mut best: Option<Solution> = None;
            for c in candidates {
                let (value, pairs) = if full {
                    let (v, extra) = self.eval(&c);
                    (v, with_extra(c, extra))
                } else {
                    (self.cheap_eval(&c), c)
                };
                if best.as_ref().map_or(true, |b| value < b.value) {
                    best = Some(Solution { value, pairs, exact: false, searched: false, evals: 0 });
                }
            }
            let mut best = best.expect("at least one candidate");
            best.evals = 1;
            return best;
        }
        let restarts = restarts.max(1);
        let per = ((affordable as u64) / restarts as u64).max(1);
        let runs: Vec<Solution> = (0..restarts)
            .into_par_iter()
            .map(|k| {
                let start = &candidates[k % candidates.len()];
                let run_seed = seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                self.anneal(start, per, run_seed)
            })
            .collect();
        let evals = runs.iter().map(|r| r.evals).sum();
        let mut best = runs
            .into_iter()
            .reduce(|a, b| if b.value < a.value { b } else { a })
            .expect("at least one restart");
        best.evals = evals;
        best
    }

    /// Sum of squared pair mismatches; breaks the plateaus of the max-type
    /// objectives during annealing.
    fn soft(&self, pairs: &[(usize, usize)]) -> f64 {
        let mut sum = 0.0;
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for &(a2, b2) in &pairs[k + 1..] {
                let g = self.gap(a, a2, b, b2);
                sum += g * g;
            }
            if self.timed() {
                let g = self.x.tau(a) - self.y.tau(b);
                sum += g * g;
            }
        }
        sum / (pairs.len() * pairs.len()) as f64
    }

    /// Annealing over a pair of maps `f: X -> Y`, `g: Y -> X`, whose graphs
    /// together form the correspondence. Moves reassign one image, couple a
    /// point with an image in both maps, or swap two images of `f`.
    fn anneal(&self, start: &[(usize, usize)], budget: u64, seed: u64) -> Solution {
        let (n, m) = (self.n(), self.m());
        let mut f = vec![usize::MAX; n];
        let mut g = vec![usize::MAX; m];
        for &(a, b) in start {
            if f[a] == usize::MAX {
                f[a] = b;
            }
            if g[b] == usize::MAX {
                g[b] = a;
            }
        }
        let relation = |f: &[usize], g: &[usize]| {
            let mut p: Pairs = f.iter().enumerate().map(|(a, &b)| (a, b)).collect();
            p.extend(g.iter().enumerate().map(|(b, &a)| (a, b)));
            normalize(p)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let score = |p: &Pairs| {
            let (v, extra) = self.eval(p);
            (v, v + 1e-3 * self.soft(p), extra)
        };
        let cur_pairs = relation(&f, &g);
        let (best0, mut energy, extra) = score(&cur_pairs);
        let mut best = best0;
        let mut best_pairs = with_extra(cur_pairs, extra);
        let t0 = 0.1 * energy.max(1e-9);
        let mut evals = 1;
        // (is_f, slot, old value)
        let mut undo: Vec<(bool, usize, usize)> = Vec::with_capacity(4);
        while evals < budget && best > 0.0 {
            let temp = t0 * (1e-3f64).powf(evals as f64 / budget as f64);
            undo.clear();
            let set = |undo: &mut Vec<_>, f: &mut [usize], g: &mut [usize], is_f: bool, slot: usize, v: usize| {
                let arr = if is_f { f } else { g };
                undo.push((is_f, slot, arr[slot]));
                arr[slot] = v;
            };
            match rng.gen_range(0..4) {
                0 if n >= 2 => {
                    let a = rng.gen_range(0..n);
                    let c = rng.gen_range(0..n);
                    let (fa, fc) = (f[a], f[c]);
                    set(&mut undo, &mut f, &mut g, true, a, fc);
                    set(&mut undo, &mut f, &mut g, true, c, fa);
                    set(&mut undo, &mut f, &mut g, false, fc, a);
                    set(&mut undo, &mut f, &mut g, false, fa, c);
                }
                1 => {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..m);
                    set(&mut undo, &mut f, &mut g, true, a, b);
                    set(&mut undo, &mut f, &mut g, false, b, a);
                }
                2 => {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..m);
                    set(&mut undo, &mut f, &mut g, true, a, b);
                }
                _ => {
                    let b = rng.gen_range(0..m);
                    let a = rng.gen_range(0..n);
                    set(&mut undo, &mut f, &mut g, false, b, a);
                }
            }
            let cand = relation(&f, &g);
            let (v, e, extra) = score(&cand);
            evals += 1;
            if e <= energy || rng.gen::<f64>() < (-(e - energy) / temp).exp() {
                energy = e;
                if v < best {
                    best = v;
                    best_pairs = with_extra(cand, extra);
                }
            } else {
                for &(is_f, slot, old) in undo.iter().rev() {
                    if is_f {
                        f[slot] = old;
                    } else {
                        g[slot] = old;
                    }
                }
            }
        }
        Solution { value: best, pairs: best_pairs, exact: false, searched: true, evals }
    }
}

fn with_extra(mut pairs: Pairs, extra: Option<(usize, usize)>) -> Pairs {
    if let Some(p) = extra {
        pairs.push(p);
        pairs = normalize(pairs);
    }
    pairs
}

struct Bnb<'p, 'a> {
    p: &'p Problem<'a>,
    pairs: Pairs,
    covered: Vec<u32>,
    best: f64,
    best_pairs: Pairs,
    leaves: u64,
    track_cost: bool,
}

impl Bnb<'_, '_> {
    fn push(&mut self, a: usize, b: usize, dis: f64, cost: &Option<Vec<f64>>) -> Option<(f64, Option<Vec<f64>>)> {
        let p = self.p;
        let new_dis = self.pairs.iter().fold(dis, |w, &(a2, b2)| w.max(p.gap(a, a2, b, b2)));
        let new_cost = cost.as_ref().map(|c| {
            let mut c = c.clone();
            p.raise_cost(&mut c, a, b);
            c
        });
        if p.partial_bound(new_dis, new_cost.as_deref()) >= self.best {
            return None;
        }
        self.pairs.push((a, b));
        self.covered[b] += 1;
        Some((new_dis, new_cost))
    }

    fn pop(&mut self) {
        let (_, b) = self.pairs.pop().expect("push before pop");
        self.covered[b] -= 1;
    }

    fn assign_x(&mut self, a: usize, dis: f64, cost: Option<Vec<f64>>) {
        if a == self.p.n() {
            let uncovered: Vec<usize> = (0..self.p.m()).filter(|&b| self.covered[b] == 0).collect();
            self.assign_y(&uncovered, 0, dis, cost);
            return;
        }
        for b in 0..self.p.m() {
            if let Some((d, c)) = self.push(a, b, dis, &cost) {
                self.assign_x(a + 1, d, c);
                self.pop();
            }
        }
    }

    fn assign_y(&mut self, uncovered: &[usize], k: usize, dis: f64, cost: Option<Vec<f64>>) {
        if k == uncovered.len() {
            self.leaf(dis, cost);
            return;
        }
        let b = uncovered[k];
        for a in 0..self.p.n() {
            if let Some((d, c)) = self.push(a, b, dis, &cost) {
                self.assign_y(uncovered, k + 1, d, c);
                self.pop();
            }
        }
    }

    fn leaf(&mut self, dis: f64, cost: Option<Vec<f64>>) {
        self.leaves += 1;
        let p = self.p;
        let (value, extra) = match p.kind {
            Kind::Gh => (dis / 2.0, None),
            Kind::Kappa | Kind::TauH => (p.hausdorff(cost.as_deref().expect("tracked")), None),
            Kind::Bb | Kind::Fd => p.eval(&self.pairs),
        };
        if value < self.best {
            self.best = value;
            self.best_pairs = with_extra(self.pairs.clone(), extra);
        }
        let _ = self.track_cost;
    }
}
