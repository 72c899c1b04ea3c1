use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{Mode, TreeState};
use crate::error::{Error, Result};
use crate::fitness::FitnessSpec;
use crate::rng::{Purpose, Stream};
use crate::weights::WeightModel;
use crate::wsampler::PrefixIndex;

/// Fitness values above this switch the sampler to rescaled weights.
const DIRECT_MAX: f64 = 1e300;
/// Headroom, in log units, above the current shift before rescaling again.
const SHIFT_HEADROOM: f64 = 300.0;

/// Sampler weights `f(outdeg, W)` with a log-domain fallback.
struct FitnessIndex<'a> {
    spec: &'a FitnessSpec,
    idx: PrefixIndex,
    shift: f64,
    scaled: bool,
}

impl<'a> FitnessIndex<'a> {
    fn new(spec: &'a FitnessSpec, cap: usize) -> Self {
        FitnessIndex { spec, idx: PrefixIndex::with_capacity(cap), shift: 0.0, scaled: false }
    }

    fn value(&mut self, d: u32, w: f64, outdeg: &[u32], weight: &[f64]) -> Result<f64> {
        if !self.scaled {
            if let Ok(f) = self.spec.eval(u64::from(d), w) {
                if f <= DIRECT_MAX {
                    return Ok(f);
                }
            }
            self.scaled = true;
            let lf = self.spec.ln_eval(u64::from(d), w)?;
            self.rescale(lf, outdeg, weight)?;
        }
        let lf = self.spec.ln_eval(u64::from(d), w)?;
        if lf - self.shift > SHIFT_HEADROOM {
            self.rescale(lf, outdeg, weight)?;
        }
        Ok((lf - self.shift).exp().max(f64::MIN_POSITIVE))
    }

    fn rescale(&mut self, lf_new: f64, outdeg: &[u32], weight: &[f64]) -> Result<()> {
        let n = self.idx.len();
        let mut logs = Vec::with_capacity(n);
        let mut top = lf_new;
        for i in 0..n {
            let l = self.spec.ln_eval(u64::from(outdeg[i]), weight[i])?;
            top = top.max(l);
            logs.push(l);
        }
        if !top.is_finite() {
            return Err(Error::NumericOverflow("log-fitness is not finite".into()));
        }
        self.shift = top;
        self.idx.rebuild_scaled(&logs, top);
        Ok(())
    }

    fn insert(&mut self, d: u32, w: f64, outdeg: &[u32], weight: &[f64]) -> Result<()> {
        let v = self.value(d, w, outdeg, weight)?;
        self.idx.insert(v)?;
        Ok(())
    }

    fn set(&mut self, i: usize, outdeg: &[u32], weight: &[f64]) -> Result<()> {
        let v = self.value(outdeg[i], weight[i], outdeg, weight)?;
        if i < self.idx.len() {
            self.idx.update(i, v)?;
        }
        Ok(())
    }

    /// Total rate in natural units as `(mantissa, log-scale)`.
    fn total(&self) -> (f64, f64) {
        (self.idx.total(), self.shift)
    }
}

fn grow_chain(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    n: usize,
    seed: u64,
    replica: u64,
    clocks: bool,
) -> Result<TreeState> {
    if n == 0 {
        return Err(Error::Argument("tree size must be at least 1".into()));
    }
    if n > u32::MAX as usize {
        return Err(Error::Argument(format!("tree size {n} exceeds the id range")));
    }
    let mut rng_w = Stream::new(seed, Purpose::Weights, replica);
    let mut rng_a = Stream::new(seed, Purpose::Attach, replica);
    let mut rng_c = Stream::new(seed, Purpose::Clocks, replica);
    let mut parent = Vec::with_capacity(n);
    let mut outdeg: Vec<u32> = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    let mut birth = if clocks { Some(Vec::with_capacity(n)) } else { None };
    let mut fx = FitnessIndex::new(spec, n);

    let w1 = wmodel.sample(&mut rng_w);
    parent.push(0u32);
    outdeg.push(0);
    weight.push(w1);
    fx.insert(0, w1, &outdeg, &weight)?;
    let mut t = 0.0f64;
    if let Some(b) = birth.as_mut() {
        b.push(0.0);
    }
    for v in 2..=n {
        if clocks {
            let (mant, shift) = fx.total();
            t += rng_c.exp1() / mant * (-shift).exp();
        }
        let u = rng_a.uniform() * fx.idx.total();
        let p = fx.idx.sample(u)?;
        outdeg[p] += 1;
        fx.set(p, &outdeg, &weight)?;
        let w = wmodel.sample(&mut rng_w);
        parent.push(p as u32 + 1);
        outdeg.push(0);
        weight.push(w);
        fx.insert(0, w, &outdeg, &weight)?;
        if let Some(b) = birth.as_mut() {
            b.push(t);
        }
        debug_assert_eq!(outdeg.len(), v);
    }
    Ok(TreeState {
        mode: if clocks { Mode::Continuous } else { Mode::Discrete },
        seed,
        replica,
        parent,
        outdeg,
        weight,
        birth_time: birth,
        scaled: fx.scaled,
    })
}

/// Discrete attachment chain.
pub fn grow_discrete(spec: &FitnessSpec, wmodel: &WeightModel, n: usize, seed: u64, replica: u64) -> Result<TreeState> {
    grow_chain(spec, wmodel, n, seed, replica, false)
}

/// Continuous-time growth by the embedded jump chain: exponential holding time
/// with the total rate, then a parent chosen proportionally to fitness.
pub fn grow_continuous(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    n: usize,
    seed: u64,
    replica: u64,
) -> Result<TreeState> {
    grow_chain(spec, wmodel, n, seed, replica, true)
}

#[derive(PartialEq)]
struct Event {
    time: f64,
    vertex: u32,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Continuous-time growth with one exponential clock per vertex held in a
/// priority queue. Slower than [`grow_continuous`]; used as an independent
/// reference for the embedding.
pub fn grow_continuous_queue(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    n: usize,
    seed: u64,
    replica: u64,
) -> Result<TreeState> {
    if n == 0 {
        return Err(Error::Argument("tree size must be at least 1".into()));
    }
    let mut rng_w = Stream::new(seed, Purpose::Weights, replica);
    let mut rng_c = Stream::new(seed, Purpose::Clocks, replica);
    let wait =
        |rng: &mut Stream, d: u32, w: f64| -> Result<f64> { Ok(rng.exp1() * (-spec.ln_eval(u64::from(d), w)?).exp()) };
    let mut parent = vec![0u32];
    let mut outdeg = vec![0u32];
    let w1 = wmodel.sample(&mut rng_w);
    let mut weight = vec![w1];
    let mut birth = vec![0.0];
    let mut queue = BinaryHeap::with_capacity(n);
    queue.push(Event { time: wait(&mut rng_c, 0, w1)?, vertex: 1 });
    while parent.len() < n {
        let ev = queue.pop().expect("queue holds every vertex");
        let p = ev.vertex as usize - 1;
        outdeg[p] += 1;
        queue.push(Event { time: ev.time + wait(&mut rng_c, outdeg[p], weight[p])?, vertex: ev.vertex });
        let w = wmodel.sample(&mut rng_w);
        parent.push(ev.vertex);
        outdeg.push(0);
        weight.push(w);
        birth.push(ev.time);
        queue.push(Event { time: ev.time + wait(&mut rng_c, 0, w)?, vertex: parent.len() as u32 });
    }
    Ok(TreeState {
        mode: Mode::Continuous,
        seed,
        replica,
        parent,
        outdeg,
        weight,
        birth_time: Some(birth),
        scaled: false,
    })
}

pub fn grow(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    n: usize,
    seed: u64,
    replica: u64,
    mode: Mode,
) -> Result<TreeState> {
    match mode {
        Mode::Discrete => grow_discrete(spec, wmodel, n, seed, replica),
        Mode::Continuous => grow_continuous(spec, wmodel, n, seed, replica),
    }
}

/// Replicas `0..replicas` in parallel, returned in replica order.
pub fn grow_replicas(
    spec: &FitnessSpec,
    wmodel: &WeightModel,
    n: usize,
    seed: u64,
    replicas: u64,
    mode: Mode,
) -> Result<Vec<TreeState>> {
    (0..replicas).into_par_iter().map(|r| grow(spec, wmodel, n, seed, r, mode)).collect()
}
