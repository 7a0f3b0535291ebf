//! The residue recursion producing all correlators `w_k^(h)`.
//!
//! For `w_{k+1}^(h)(q, P_K)` the engine takes residues at every branch point α
//! of `dS_{t,o}(q)·K_α(t)` where, with `t = α + s`,
//!
//! ```text
//! K_α = Σ_j W₂(t, ϑ^j t, P_K)/ω(t, ϑ^j t) + [n_b = 2]·W₃(t, ϑ¹t, ϑ²t, P_K)/(ω(t, ϑ¹t)·ω(t, ϑ²t))
//! ```
//!
//! Correlators are stored as [`Tensor`]s: sums of products of `dz/(z − a)^d`
//! forms, one per symbolic slot, with concrete spectator points already
//! substituted. Arguments that depend on the residue variable are handled by
//! substituting local series into these forms.

mod tensor;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use crate::algebra::{Field, Ring, Scalar, Series, EXACT};
use crate::curve::{Rf, SpectralCurve};
use crate::error::{Error, Result};
use crate::kernels::{self, SeriesPoint};

pub use tensor::{Basis, SlotKey, Tensor};

/// Argument of a correlator slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Sym,
    At(Scalar),
}

/// Genus index and slot signature of a correlator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub h: usize,
    pub slots: Vec<Slot>,
}

impl CorrelatorKey {
    pub fn new(h: usize, slots: Vec<Slot>) -> Self {
        CorrelatorKey { h, slots }
    }

    /// All `k` slots symbolic.
    pub fn symbolic(h: usize, k: usize) -> Self {
        CorrelatorKey { h, slots: vec![Slot::Sym; k] }
    }

    /// First slot symbolic, the others at the given points.
    pub fn with_points(h: usize, points: &[Scalar]) -> Self {
        let mut slots = vec![Slot::Sym];
        slots.extend(points.iter().cloned().map(Slot::At));
        CorrelatorKey { h, slots }
    }

    pub fn k(&self) -> usize {
        self.slots.len()
    }

    /// Euler characteristic 2 − 2h − k.
    pub fn chi(&self) -> i64 {
        2 - 2 * self.h as i64 - self.k() as i64
    }

    pub fn describe(&self) -> String {
        let args: Vec<String> = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Slot::Sym => format!("p{i}"),
                Slot::At(p) => p.to_string(),
            })
            .collect();
        format!("w_{}^({})({})", self.k(), self.h, args.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Starting truncation order; chosen from (h, k) when absent.
    pub initial_order: Option<i64>,
    /// Adaptive doubling stops with an error beyond this order.
    pub max_order: i64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { initial_order: None, max_order: 128 }
    }
}

impl EngineConfig {
    /// Default configuration with `max_order` taken from `TOPREC_MAX_ORDER` if set.
    pub fn from_env() -> Result<Self> {
        let mut c = EngineConfig::default();
        if let Ok(v) = std::env::var("TOPREC_MAX_ORDER") {
            c.max_order = v
                .trim()
                .parse()
                .ok()
                .filter(|&n: &i64| n > 0)
                .ok_or_else(|| Error::Usage(format!("TOPREC_MAX_ORDER must be a positive integer, got `{v}`")))?;
        }
        Ok(c)
    }
}

/// A spectator slot during evaluation: symbolic (with its output slot label) or concrete.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Spectator {
    Slot(u16),
    Value(Scalar),
}

/// Series data at one branch point for one truncation order.
struct Local {
    alpha: Scalar,
    nb: usize,
    /// Index 0 is t = α + s, index j is ϑ^j(t).
    args: Vec<SeriesPoint>,
    inv_omega: Vec<Series<Scalar>>,
    inv_omega12: Option<Series<Scalar>>,
}

/// Stored result with its per-branch-point split.
#[derive(Clone, Debug)]
struct Entry {
    total: Arc<Tensor>,
    contributions: Vec<Tensor>,
    order: i64,
}

/// Correlator value with provenance.
#[derive(Clone, Debug)]
pub struct CorrelatorValue {
    pub key: CorrelatorKey,
    pub tensor: Arc<Tensor>,
    /// Contribution of each branch point, in curve order.
    pub contributions: Vec<Tensor>,
    /// Truncation order at which the residues were accepted (0 for base cases).
    pub order: i64,
}

impl CorrelatorValue {
    /// Rational function of the first slot when all other slots are concrete.
    pub fn rational(&self) -> Result<Rf> {
        self.tensor.to_rational(0)
    }
}

type EvalKey = (usize, Vec<usize>, Vec<Spectator>);

struct Ctx {
    bp: usize,
    n: i64,
    local: Arc<Local>,
    evals: HashMap<EvalKey, Series<Tensor>>,
}

/// Memoizing recursion engine bound to one curve.
pub struct Engine {
    curve: SpectralCurve,
    config: EngineConfig,
    table: RwLock<HashMap<CorrelatorKey, Entry>>,
    locals: Mutex<HashMap<(usize, i64), Arc<Local>>>,
    basis_cache: Mutex<HashMap<(usize, i64, usize, Basis), Arc<Series<Scalar>>>>,
}

fn lift(s: &Series<Scalar>) -> Series<Tensor> {
    s.map(|c| Tensor::scalar(c.clone()))
}

fn insufficient(e: &Error) -> bool {
    matches!(e, Error::InsufficientOrder { .. } | Error::EmptyExpansion { .. })
}

impl Engine {
    pub fn new(curve: SpectralCurve, config: EngineConfig) -> Self {
        Engine {
            curve,
            config,
            table: RwLock::new(HashMap::new()),
            locals: Mutex::new(HashMap::new()),
            basis_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_defaults(curve: SpectralCurve) -> Self {
        Self::new(curve, EngineConfig::default())
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Truncation orders used so far, by correlator.
    pub fn orders(&self) -> BTreeMap<String, i64> {
        let t = self.table.read().expect("table lock");
        t.iter().map(|(k, e)| (k.describe(), e.order)).collect()
    }

    fn check_key(&self, key: &CorrelatorKey) -> Result<()> {
        if key.k() == 0 {
            return Err(Error::Usage("a correlator needs at least one slot".into()));
        }
        if key.slots[0] != Slot::Sym {
            return Err(Error::Usage("the first slot of a stored correlator must be symbolic".into()));
        }
        for s in &key.slots {
            if let Slot::At(p) = s {
                if self.curve.branch_points().iter().any(|b| b.location == *p) {
                    return Err(Error::Pole(format!("spectator {p} is a branch point")));
                }
            }
        }
        Ok(())
    }

    /// Correlator with the first slot symbolic.
    pub fn correlator(&self, key: &CorrelatorKey) -> Result<CorrelatorValue> {
        self.check_key(key)?;
        if key.h == 0 && key.k() <= 2 {
            let tensor = match &key.slots[..] {
                [_] => Tensor::default(),
                [_, Slot::At(p)] => Tensor::single(0, Basis::new(p.clone(), 2), Scalar::one()),
                _ => {
                    return Err(Error::Usage(
                        "w_2^(0)(q, p) = dq dp/(q - p)^2 with both slots symbolic has no pole-basis form".into(),
                    ))
                }
            };
            return Ok(CorrelatorValue { key: key.clone(), tensor: Arc::new(tensor), contributions: Vec::new(), order: 0 });
        }
        let e = self.entry(key)?;
        Ok(CorrelatorValue { key: key.clone(), tensor: e.total, contributions: e.contributions, order: e.order })
    }

    /// `w_k^(h)(q, points...)` as a rational function of q.
    pub fn rational(&self, h: usize, points: &[Scalar]) -> Result<Rf> {
        self.correlator(&CorrelatorKey::with_points(h, points))?.rational()
    }

    fn tensor(&self, key: &CorrelatorKey) -> Result<Arc<Tensor>> {
        Ok(self.entry(key)?.total)
    }

    fn entry(&self, key: &CorrelatorKey) -> Result<Entry> {
        if let Some(e) = self.table.read().expect("table lock").get(key) {
            return Ok(e.clone());
        }
        let max = self.config.max_order;
        let mut n = self.config.initial_order.unwrap_or(6 + 6 * key.h as i64 + 3 * key.k() as i64).min(max);
        loop {
            match self.try_compute(key, n) {
                Ok(entry) => {
                    let mut t = self.table.write().expect("table lock");
                    return Ok(t.entry(key.clone()).or_insert(entry).clone());
                }
                Err(e) if insufficient(&e) => {
                    if n >= max {
                        return Err(Error::OrderCap { cap: max as usize, what: key.describe() });
                    }
                    n = (2 * n).min(max);
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn local(&self, bp: usize, n: i64) -> Result<Arc<Local>> {
        if let Some(l) = self.locals.lock().expect("locals lock").get(&(bp, n)) {
            return Ok(l.clone());
        }
        let b = &self.curve.branch_points()[bp];
        let alpha = b.location.clone();
        let mut args = vec![SeriesPoint::local(&alpha)];
        let mut inv_omega = Vec::new();
        for j in 1..=b.nb {
            let germ = self.curve.deck_germ(bp, j, n + 2)?;
            args.push(SeriesPoint::new(Series::constant(alpha.clone()).plus(&germ.series)));
            let mut extra = 2 * b.nb as i64 + 4;
            let w = loop {
                let w = kernels::omega_j(&self.curve, bp, j, n + extra)?;
                match w.valuation() {
                    Some(v) if v + n <= w.prec() => break w.truncate(v + n),
                    _ if extra > 4 * n + 64 => {
                        return Err(Error::Validation(format!("ω(t, ϑ^{j} t) vanishes to high order at z = {alpha}")))
                    }
                    _ => extra *= 2,
                }
            };
            inv_omega.push(w.recip()?);
        }
        let inv_omega12 = (b.nb == 2).then(|| inv_omega[0].times(&inv_omega[1]));
        let local = Arc::new(Local { alpha, nb: b.nb, args, inv_omega, inv_omega12 });
        self.locals.lock().expect("locals lock").insert((bp, n), local.clone());
        Ok(local)
    }

    fn try_compute(&self, key: &CorrelatorKey, n: i64) -> Result<Entry> {
        let spect: Vec<Spectator> = key.slots[1..]
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Slot::Sym => Spectator::Slot(i as u16 + 1),
                Slot::At(p) => Spectator::Value(p.clone()),
            })
            .collect();
        let o = self.curve.basepoint().clone();
        let mut total = Tensor::default();
        let mut contributions = Vec::new();
        for bp in 0..self.curve.branch_points().len() {
            let local = self.local(bp, n)?;
            let mut ctx = Ctx { bp, n, local: local.clone(), evals: HashMap::new() };
            let mut k = Series::<Tensor>::exact_zero();
            for j in 1..=local.nb {
                let w = self.assemble_w2(key.h, 0, j, &spect, &mut ctx)?;
                k = k.plus(&w.times(&lift(&local.inv_omega[j - 1])));
            }
            if let Some(inv12) = &local.inv_omega12 {
                let w = self.assemble_w3(key.h, &spect, &mut ctx)?;
                k = k.plus(&w.times(&lift(inv12)));
            }
            if k.prec() < 0 {
                return Err(Error::InsufficientOrder { needed: -1, known: k.prec() });
            }
            // −Res dS_{t,o}(q)·K with 1/(q − t) = Σ_m s^m/(q − α)^{m+1}.
            let mut part = Tensor::default();
            for (e, t) in k.terms() {
                if e >= 0 {
                    break;
                }
                let head = Tensor::single(0, Basis::new(local.alpha.clone(), (-e) as u32), Scalar::int(-1));
                part.add_assign(&head.times(t));
                if e == -1 {
                    part.add_assign(&Tensor::single(0, Basis::new(o.clone(), 1), Scalar::one()).times(t));
                }
            }
            total.add_assign(&part);
            contributions.push(part);
        }
        Ok(Entry { total: Arc::new(total), contributions, order: n })
    }

    /// W₂ with arguments `a`, `b` (indices into the local series points).
    fn assemble_w2(&self, h: usize, a: usize, b: usize, spect: &[Spectator], ctx: &mut Ctx) -> Result<Series<Tensor>> {
        let k = spect.len();
        let mut acc = Series::exact_zero();
        if h >= 1 {
            acc = acc.plus(&self.eval(h - 1, &[a, b], spect, ctx)?);
        }
        for mask in 0..(1usize << k) {
            let (j, rest) = split(spect, mask);
            for m in 0..=h {
                if (m == 0 && j.is_empty()) || (m == h && rest.is_empty()) {
                    continue;
                }
                let left = self.eval(m, &[a], &j, ctx)?;
                if left.is_zero_known() && left.is_exact() {
                    continue;
                }
                let right = self.eval(h - m, &[b], &rest, ctx)?;
                acc = acc.plus(&left.times(&right));
            }
        }
        Ok(acc)
    }

    /// W₃ with arguments t, ϑ¹t, ϑ²t; sums run over all splittings of genus
    /// and spectators.
    fn assemble_w3(&self, h: usize, spect: &[Spectator], ctx: &mut Ctx) -> Result<Series<Tensor>> {
        let k = spect.len();
        let mut acc = Series::exact_zero();
        if h >= 2 {
            acc = acc.plus(&self.eval(h - 2, &[0, 1, 2], spect, ctx)?);
        }
        if h >= 1 {
            for (x, y, z) in [(0, 1, 2), (1, 0, 2), (2, 0, 1)] {
                for mask in 0..(1usize << k) {
                    let (j, rest) = split(spect, mask);
                    for m in 0..h {
                        if m == 0 && j.is_empty() {
                            continue;
                        }
                        let single = self.eval(m, &[x], &j, ctx)?;
                        let pair = self.eval(h - 1 - m, &[y, z], &rest, ctx)?;
                        acc = acc.plus(&single.times(&pair));
                    }
                }
            }
        }
        let mut assignment = vec![0u8; k];
        loop {
            let parts: Vec<Vec<Spectator>> = (0..3)
                .map(|p| spect.iter().zip(&assignment).filter(|(_, &a)| a == p).map(|(s, _)| s.clone()).collect())
                .collect();
            for m in 0..=h {
                for nn in 0..=h - m {
                    let l = h - m - nn;
                    let genera = [m, nn, l];
                    if (0..3).any(|i| genera[i] == 0 && parts[i].is_empty()) {
                        continue;
                    }
                    let mut prod = self.eval(m, &[0], &parts[0], ctx)?;
                    prod = prod.times(&self.eval(nn, &[1], &parts[1], ctx)?);
                    prod = prod.times(&self.eval(l, &[2], &parts[2], ctx)?);
                    acc = acc.plus(&prod);
                }
            }
            // next base-3 assignment
            let mut i = 0;
            while i < k && assignment[i] == 2 {
                assignment[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            assignment[i] += 1;
        }
        Ok(acc)
    }

    /// `w^(h)` at local series arguments followed by spectators.
    fn eval(&self, h: usize, args: &[usize], spect: &[Spectator], ctx: &mut Ctx) -> Result<Series<Tensor>> {
        let ek: EvalKey = (h, args.to_vec(), spect.to_vec());
        if let Some(s) = ctx.evals.get(&ek) {
            return Ok(s.clone());
        }
        let n = args.len() + spect.len();
        let out = if h == 0 && n == 1 {
            Series::exact_zero()
        } else if h == 0 && n == 2 {
            match (args, spect) {
                ([a, b], []) => {
                    lift(&kernels::bergman_series(&ctx.local.args[*a], &ctx.local.args[*b], ctx.n)?)
                }
                ([a], [Spectator::Value(p)]) => lift(&kernels::bergman_series_point(&ctx.local.args[*a], p, ctx.n)?),
                ([a], [Spectator::Slot(label)]) => self.bergman_expansion(*a, *label, ctx)?,
                _ => unreachable!("w_2^(0) always has a series argument here"),
            }
        } else {
            let mut slots = vec![Slot::Sym; args.len()];
            slots.extend(spect.iter().map(|s| match s {
                Spectator::Slot(_) => Slot::Sym,
                Spectator::Value(p) => Slot::At(p.clone()),
            }));
            let t = self.tensor(&CorrelatorKey { h, slots })?;
            self.substitute(&t, args, spect, ctx)?
        };
        ctx.evals.insert(ek, out.clone());
        Ok(out)
    }

    /// B(z(s), p) with p symbolic in output slot `label`, expanded in forms at α.
    fn bergman_expansion(&self, arg: usize, label: u16, ctx: &Ctx) -> Result<Series<Tensor>> {
        let pt = &ctx.local.args[arg];
        let u = pt.z.minus(&Series::constant(ctx.local.alpha.clone()));
        let vu = u.valuation().ok_or_else(|| Error::Contract("local argument does not move".into()))?;
        let mut acc = Series::<Tensor>::zero_to(ctx.n);
        let mut upow = pt.dz.clone();
        let mut m = 0i64;
        while m * vu < ctx.n {
            let t = Tensor::single(label, Basis::new(ctx.local.alpha.clone(), m as u32 + 2), Scalar::int(m + 1));
            acc = acc.plus(&upow.map(|c| t.scale_by(c)));
            upow = upow.times(&u);
            m += 1;
        }
        Ok(acc)
    }

    fn basis_series(&self, arg: usize, b: &Basis, ctx: &Ctx) -> Result<Arc<Series<Scalar>>> {
        let ck = (ctx.bp, ctx.n, arg, b.clone());
        if let Some(s) = self.basis_cache.lock().expect("cache lock").get(&ck) {
            return Ok(s.clone());
        }
        let pt = &ctx.local.args[arg];
        let u = pt.z.minus(&Series::constant(b.point.clone()));
        let s = Arc::new(pt.dz.times(&kernels::inverse_power(&u, b.order, ctx.n)?));
        self.basis_cache.lock().expect("cache lock").insert(ck, s.clone());
        Ok(s)
    }

    fn substitute(&self, t: &Tensor, args: &[usize], spect: &[Spectator], ctx: &Ctx) -> Result<Series<Tensor>> {
        let na = args.len() as u16;
        let mut groups: BTreeMap<Vec<Basis>, Tensor> = BTreeMap::new();
        for (key, c) in t.terms() {
            let mut arg_part = Vec::with_capacity(args.len());
            let mut rest: SlotKey = Vec::new();
            for (slot, b) in key {
                if *slot < na {
                    arg_part.push(b.clone());
                } else {
                    match &spect[(*slot - na) as usize] {
                        Spectator::Slot(label) => rest.push((*label, b.clone())),
                        Spectator::Value(_) => return Err(Error::Contract("form in a concrete slot".into())),
                    }
                }
            }
            if arg_part.len() != args.len() {
                return Err(Error::Contract("stored correlator term misses a symbolic slot".into()));
            }
            rest.sort_by(|a, b| a.0.cmp(&b.0));
            let mut single = Tensor::default();
            single.add_term(rest, c.clone());
            groups.entry(arg_part).or_default().add_assign(&single);
        }
        let mut acc = Series::<Tensor>::exact_zero();
        for (bases, tens) in groups {
            let mut s = Series::constant(Scalar::one());
            for (i, b) in bases.iter().enumerate() {
                s = s.times(&*self.basis_series(args[i], b, ctx)?);
            }
            acc = acc.plus(&s.map(|c| tens.scale_by(c)));
        }
        Ok(acc)
    }

    /// Evaluate `w_k^(h)` with every slot at a series argument whose
    /// coefficients may themselves be rational functions or series.
    pub fn nested_evaluate<C: Field>(&self, h: usize, args: &[Series<C>]) -> Result<Series<C>> {
        let k = args.len();
        let cap = 2 * h + k + 2;
        let depth = C::depth() + 1;
        if depth > cap {
            return Err(Error::DepthCap { depth, cap });
        }
        if h == 0 && k == 1 {
            return Ok(Series::exact_zero());
        }
        let rel = args.iter().map(|a| a.prec() - a.order_bound()).min().unwrap_or(EXACT).min(32);
        let inv_pow = |u: &Series<C>, d: u32| -> Result<Series<C>> {
            let v = u.valuation().ok_or_else(|| Error::Pole("argument at a pole".into()))?;
            Ok(u.truncate(v + rel).recip()?.pow_nonneg(d))
        };
        let dz: Vec<Series<C>> = args.iter().map(Series::derivative).collect();
        if h == 0 && k == 2 {
            let diff = args[0].minus(&args[1]);
            return Ok(dz[0].times(&dz[1]).times(&inv_pow(&diff, 2)?));
        }
        let t = self.tensor(&CorrelatorKey::symbolic(h, k))?;
        let mut acc = Series::exact_zero();
        for (key, c) in t.terms() {
            let mut s = Series::constant(C::from_scalar(c));
            for (slot, b) in key {
                let i = *slot as usize;
                let u = args[i].minus(&Series::constant(C::from_scalar(&b.point)));
                s = s.times(&dz[i]).times(&inv_pow(&u, b.order)?);
            }
            acc = acc.plus(&s);
        }
        Ok(acc)
    }
}

fn split(spect: &[Spectator], mask: usize) -> (Vec<Spectator>, Vec<Spectator>) {
    let mut j = Vec::new();
    let mut rest = Vec::new();
    for (i, s) in spect.iter().enumerate() {
        if mask & (1 << i) != 0 {
            j.push(s.clone());
        } else {
            rest.push(s.clone());
        }
    }
    (j, rest)
}
