//! Spin systems with exact rational energies, and the finite instance they induce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::budget::{space_size, Meter};
use crate::error::{Error, Result};
use crate::finrel::{FinRel, FinSet};
use crate::order::Preorder;
use crate::simcat::Processing;
use crate::tcc::{Ambient, BehaviorStructure, TccInstance};

pub type Energy = BigRational;

pub fn int(n: i64) -> Energy {
    BigRational::from_integer(n.into())
}

/// Vertices and an antichain of facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: FinSet,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn new(vertices: FinSet, facets: Vec<Vec<usize>>) -> Result<Self> {
        let mut norm = Vec::with_capacity(facets.len());
        for mut e in facets {
            e.sort_unstable();
            e.dedup();
            if let Some(&v) = e.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::UnknownElement {
                    set: vertices.id().to_string(),
                    element: format!("#{v}"),
                });
            }
            norm.push(e);
        }
        for (i, e) in norm.iter().enumerate() {
            for (j, f) in norm.iter().enumerate() {
                if i != j && e.iter().all(|v| f.contains(v)) {
                    return Err(Error::invalid(
                        "simplicial complex",
                        format!(
                            "facet #{i} is contained in facet #{j}; facets must form an antichain"
                        ),
                    ));
                }
            }
        }
        Ok(SimplicialComplex {
            vertices,
            facets: norm,
        })
    }

    pub fn empty() -> Self {
        SimplicialComplex {
            vertices: FinSet::numbered("V", "v", 0),
            facets: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &FinSet {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Applies a vertex bijection; `None` if the facet set is not preserved.
    fn permuted_facet(&self, pi: &[usize], e: &[usize]) -> Option<usize> {
        let mut image: Vec<usize> = e.iter().map(|&v| pi[v]).collect();
        image.sort_unstable();
        self.facets.iter().position(|f| f == &image)
    }
}

/// A `q`-level spin system: one local energy table per facet and a threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSystem {
    pub name: String,
    pub complex: SimplicialComplex,
    pub levels: usize,
    /// `terms[e]` is indexed by the local configuration read as a base-`q`
    /// number, first facet vertex most significant.
    pub terms: Vec<Vec<Energy>>,
    pub delta: Energy,
}

impl SpinSystem {
    pub fn new(
        name: impl Into<String>,
        complex: SimplicialComplex,
        levels: usize,
        terms: Vec<Vec<Energy>>,
        delta: Energy,
    ) -> Result<Self> {
        let name = name.into();
        if levels == 0 {
            return Err(Error::invalid(
                "spin system",
                format!("`{name}` needs at least one spin level"),
            ));
        }
        if terms.len() != complex.facets.len() {
            return Err(Error::invalid(
                "spin system",
                format!(
                    "`{name}` has {} local terms for {} facets",
                    terms.len(),
                    complex.facets.len()
                ),
            ));
        }
        for (e, table) in complex.facets.iter().zip(&terms) {
            let want = levels.checked_pow(e.len() as u32).unwrap_or(usize::MAX);
            if table.len() != want {
                return Err(Error::invalid(
                    "spin system",
                    format!(
                        "`{name}`: facet of size {} needs {want} energies, got {}",
                        e.len(),
                        table.len()
                    ),
                ));
            }
        }
        Ok(SpinSystem {
            name,
            complex,
            levels,
            terms,
            delta,
        })
    }

    /// Total energy `Σ_e H_e(σ|_e)`.
    pub fn energy(&self, sigma: &SpinConfiguration) -> Result<Energy> {
        if sigma.complex != self.complex || sigma.levels != self.levels {
            return Err(Error::TypeMismatch(format!(
                "configuration does not belong to the complex of `{}`",
                self.name
            )));
        }
        Ok(self.energy_unchecked(&sigma.assignment))
    }

    fn energy_unchecked(&self, assignment: &[usize]) -> Energy {
        let mut total = Energy::zero();
        for (e, table) in self.complex.facets.iter().zip(&self.terms) {
            let idx = e
                .iter()
                .fold(0usize, |acc, &v| acc * self.levels + assignment[v]);
            total += &table[idx];
        }
        total
    }

    /// All attainable energies.
    pub fn spectrum(&self, meter: &mut Meter) -> Result<BTreeSet<Energy>> {
        let n = self.complex.vertices.len();
        let count = space_size(self.levels as u128, n);
        meter.reserve(count, "spectrum enumeration")?;
        meter.charge(count as u64, "spectrum enumeration")?;
        let mut out = BTreeSet::new();
        let mut assignment = vec![0usize; n];
        loop {
            out.insert(self.energy_unchecked(&assignment));
            if !next_assignment(&mut assignment, self.levels) {
                break;
            }
        }
        Ok(out)
    }

    /// `Σ_e q^{|e|}`.
    pub fn size_measure(&self) -> u128 {
        size_measure(&self.complex, self.levels)
    }

    /// The system `H'` with `H'(σ∘π⁻¹) = H(σ)`, where `π` must map facets to facets.
    pub fn permuted(&self, pi: &[usize]) -> Result<SpinSystem> {
        check_bijection(pi, self.complex.vertices.len())?;
        let mut terms = vec![Vec::new(); self.terms.len()];
        for (e, table) in self.complex.facets.iter().zip(&self.terms) {
            let Some(target) = self.complex.permuted_facet(pi, e) else {
                return Err(Error::invalid(
                    "vertex permutation",
                    format!("does not preserve the facets of `{}`", self.name),
                ));
            };
            let image = &self.complex.facets[target];
            // Local configuration τ on the image facet pulls back to τ∘π on e.
            let mut new_table = vec![Energy::zero(); table.len()];
            for (idx, slot) in new_table.iter_mut().enumerate() {
                let tau = digits(idx, self.levels, image.len());
                let local: Vec<usize> = e
                    .iter()
                    .map(|&v| {
                        tau[image
                            .iter()
                            .position(|&w| w == pi[v])
                            .expect("image vertex")]
                    })
                    .collect();
                let back = local.iter().fold(0usize, |acc, &x| acc * self.levels + x);
                *slot = table[back].clone();
            }
            terms[target] = new_table;
        }
        SpinSystem::new(
            format!("{}∘π", self.name),
            self.complex.clone(),
            self.levels,
            terms,
            self.delta.clone(),
        )
    }

    /// Same data up to the name.
    pub fn same_hamiltonian(&self, other: &SpinSystem) -> bool {
        self.complex == other.complex
            && self.levels == other.levels
            && self.terms == other.terms
            && self.delta == other.delta
    }
}

pub fn size_measure(complex: &SimplicialComplex, levels: usize) -> u128 {
    complex
        .facets
        .iter()
        .map(|e| space_size(levels as u128, e.len()))
        .sum()
}

/// Spectrum restricted to energies `≤ Δ`.
pub fn reduced(spectrum: &BTreeSet<Energy>, delta: &Energy) -> BTreeSet<Energy> {
    spectrum.iter().filter(|e| *e <= delta).cloned().collect()
}

fn digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

fn next_assignment(a: &mut [usize], q: usize) -> bool {
    for x in a.iter_mut().rev() {
        *x += 1;
        if *x < q {
            return true;
        }
        *x = 0;
    }
    false
}

fn check_bijection(pi: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if pi.len() != n {
        return Err(Error::invalid(
            "vertex permutation",
            format!("expected {n} images, got {}", pi.len()),
        ));
    }
    for &v in pi {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid("vertex permutation", "not a bijection"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration {
    pub complex: SimplicialComplex,
    pub levels: usize,
    pub assignment: Vec<usize>,
}

/// `(e, S, Δ)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpinBehavior {
    pub energy: Energy,
    pub spectrum: BTreeSet<Energy>,
    pub delta: Energy,
}

impl fmt::Display for SpinBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.spectrum.iter().map(ToString::to_string).collect();
        write!(f, "{}|{{{}}}|{}", self.energy, s.join(","), self.delta)
    }
}

/// Defined iff the configuration fits the system and `H(σ) ≤ Δ`.
pub fn spin_eval(
    system: &SpinSystem,
    sigma: &SpinConfiguration,
    meter: &mut Meter,
) -> Result<Option<SpinBehavior>> {
    if sigma.complex != system.complex || sigma.levels != system.levels {
        return Ok(None);
    }
    let energy = system.energy(sigma)?;
    if energy > system.delta {
        return Ok(None);
    }
    Ok(Some(SpinBehavior {
        energy,
        spectrum: system.spectrum(meter)?,
        delta: system.delta.clone(),
    }))
}

/// `(e, S, Δ) ⪰ (e', S', Δ')`.
pub fn spin_brel(b1: &SpinBehavior, b2: &SpinBehavior) -> bool {
    reduced(&b1.spectrum, &b2.delta) == reduced(&b2.spectrum, &b2.delta)
        && b1.delta >= b2.delta
        && b1.energy == b2.energy
        && b1.energy <= b2.delta
}

/// Independent vertices `0..n` with `H_i(0) = 0`, `H_i(1) = 1` and `Δ = n`.
pub fn field_system(n: usize) -> SpinSystem {
    let vertices = FinSet::numbered(format!("V{n}"), "v", n);
    let complex = SimplicialComplex::new(vertices, (0..n).map(|i| vec![i]).collect())
        .expect("singletons are an antichain");
    let terms = vec![vec![int(0), int(1)]; n];
    SpinSystem::new(format!("field{n}"), complex, 2, terms, int(n as i64))
        .expect("field system is well formed")
}

/// Two-level system with Ising terms `J s_i s_j + B_i s_i + B_j s_j`, `s = (-1)^σ`,
/// on the edges of `complex`.
pub fn ising(
    name: impl Into<String>,
    complex: SimplicialComplex,
    couplings: &[Energy],
    fields: &[Energy],
    delta: Energy,
) -> Result<SpinSystem> {
    let name = name.into();
    if couplings.len() != complex.facets.len() || fields.len() != complex.vertices.len() {
        return Err(Error::invalid(
            "ising system",
            format!("`{name}` needs one coupling per facet and one field per vertex"),
        ));
    }
    let sign = |x: usize| {
        if x == 0 {
            Energy::one()
        } else {
            -Energy::one()
        }
    };
    let mut terms = Vec::with_capacity(couplings.len());
    for (e, j) in complex.facets.iter().zip(couplings) {
        let [a, b] = e[..] else {
            return Err(Error::invalid(
                "ising system",
                format!("`{name}` has a facet that is not an edge"),
            ));
        };
        let mut table = Vec::with_capacity(4);
        for sa in 0..2 {
            for sb in 0..2 {
                table.push(j * sign(sa) * sign(sb) + &fields[a] * sign(sa) + &fields[b] * sign(sb));
            }
        }
        terms.push(table);
    }
    SpinSystem::new(name, complex, 2, terms, delta)
}

/// A spin instance together with the data behind its labels.
#[derive(Debug, Clone)]
pub struct SpinTcc {
    pub instance: TccInstance,
    pub systems: Vec<SpinSystem>,
    /// Distinct `(complex, levels)` pairs, named `K0`, `K1`, ...
    pub complexes: Vec<(SimplicialComplex, usize)>,
    /// For each context, its complex index and assignment.
    pub configs: Vec<(usize, Vec<usize>)>,
    pub behaviors: Vec<SpinBehavior>,
}

impl SpinTcc {
    pub fn configuration(&self, c: usize) -> SpinConfiguration {
        let (k, ref assignment) = self.configs[c];
        let (complex, levels) = &self.complexes[k];
        SpinConfiguration {
            complex: complex.clone(),
            levels: *levels,
            assignment: assignment.clone(),
        }
    }

    pub fn complex_of(&self, t: usize) -> usize {
        let s = &self.systems[t];
        self.complexes
            .iter()
            .position(|(k, q)| k == &s.complex && *q == s.levels)
            .expect("complex registered")
    }

    pub fn spectrum(&self, t: usize, meter: &mut Meter) -> Result<BTreeSet<Energy>> {
        self.systems[t].spectrum(meter)
    }
}

fn config_label(k: usize, levels: usize, assignment: &[usize]) -> String {
    if assignment.is_empty() {
        return format!("K{k}/_");
    }
    let parts: Vec<String> = assignment.iter().map(ToString::to_string).collect();
    if levels > 10 {
        format!("K{k}/{}", parts.join("."))
    } else {
        format!("K{k}/{}", parts.concat())
    }
}

/// Targets are `systems`, contexts every configuration of their complexes,
/// behaviors the realized `(e, S, Δ)`.
pub fn build_spin_tcc(
    name: impl Into<String>,
    systems: Vec<SpinSystem>,
    meter: &mut Meter,
) -> Result<SpinTcc> {
    let name = name.into();
    let targets = FinSet::new("T", systems.iter().map(|s| s.name.clone()))?;
    let mut complexes: Vec<(SimplicialComplex, usize)> = Vec::new();
    for s in &systems {
        if !complexes
            .iter()
            .any(|(k, q)| k == &s.complex && *q == s.levels)
        {
            complexes.push((s.complex.clone(), s.levels));
        }
    }
    let total: u128 = complexes
        .iter()
        .map(|(k, q)| space_size(*q as u128, k.vertices.len()))
        .sum();
    meter.reserve(
        total.saturating_mul(systems.len().max(1) as u128),
        "spin configurations",
    )?;
    let mut configs = Vec::new();
    let mut labels = Vec::new();
    for (k, (complex, q)) in complexes.iter().enumerate() {
        let mut a = vec![0usize; complex.vertices.len()];
        loop {
            labels.push(config_label(k, *q, &a));
            configs.push((k, a.clone()));
            if !next_assignment(&mut a, *q) {
                break;
            }
        }
    }
    let contexts = FinSet::new("C", labels)?;
    let spectra: Vec<BTreeSet<Energy>> = systems
        .iter()
        .map(|s| s.spectrum(meter))
        .collect::<Result<_>>()?;
    let mut table: Vec<Option<SpinBehavior>> = Vec::with_capacity(systems.len() * configs.len());
    for (s, spectrum) in systems.iter().zip(&spectra) {
        for (k, a) in &configs {
            let (complex, q) = &complexes[*k];
            let value = if complex == &s.complex && *q == s.levels {
                let e = s.energy_unchecked(a);
                (e <= s.delta).then(|| SpinBehavior {
                    energy: e,
                    spectrum: spectrum.clone(),
                    delta: s.delta.clone(),
                })
            } else {
                None
            };
            table.push(value);
        }
        meter.charge(configs.len() as u64, "spin evaluation")?;
    }
    let realized: BTreeSet<SpinBehavior> = table.iter().flatten().cloned().collect();
    let behaviors: Vec<SpinBehavior> = realized.into_iter().collect();
    let index: BTreeMap<&SpinBehavior, usize> =
        behaviors.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let bset = FinSet::new("B", behaviors.iter().map(ToString::to_string))?;
    let order = Preorder::from_fn(&bset, |x, y| spin_brel(&behaviors[x], &behaviors[y]))?;
    let pairs = FinSet::product(&targets, &contexts);
    let eval = FinRel::from_fn(&pairs, &bset, |k| table[k].as_ref().map(|b| index[b]));
    let instance = TccInstance::new(
        name,
        &targets,
        &contexts,
        BehaviorStructure::new(eval, order)?,
        Ambient::Relations,
    )?;
    Ok(SpinTcc {
        instance,
        systems,
        complexes,
        configs,
        behaviors,
    })
}

/// `q_C` relabels configurations by `σ ↦ σ∘π⁻¹`, `q_T` maps each system to
/// the one with couplings moved along `π`; `pis[k]` is the bijection for
/// complex `k`, which must preserve its facets.
pub fn spin_permutation_processing(
    spin: &SpinTcc,
    pis: &[Vec<usize>],
    programs: &FinSet,
) -> Result<Processing> {
    if pis.len() != spin.complexes.len() {
        return Err(Error::invalid(
            "spin processing",
            format!("expected {} bijections", spin.complexes.len()),
        ));
    }
    for ((complex, _), pi) in spin.complexes.iter().zip(pis) {
        check_bijection(pi, complex.vertices.len())?;
    }
    let inst = &spin.instance;
    let mut system_image = Vec::with_capacity(spin.systems.len());
    for (t, s) in spin.systems.iter().enumerate() {
        let moved = s.permuted(&pis[spin.complex_of(t)])?;
        let found = spin
            .systems
            .iter()
            .position(|x| x.same_hamiltonian(&moved))
            .ok_or_else(|| {
                Error::invalid(
                    "spin processing",
                    format!("the permuted `{}` is not among the targets", s.name),
                )
            })?;
        system_image.push(found);
    }
    let config_image: Vec<usize> = spin
        .configs
        .iter()
        .map(|(k, a)| {
            let pi = &pis[*k];
            let mut moved = vec![0; a.len()];
            for (v, &x) in a.iter().enumerate() {
                moved[pi[v]] = x;
            }
            spin.configs
                .iter()
                .position(|(k2, b)| k2 == k && b == &moved)
                .expect("configurations are closed")
        })
        .collect();
    let nt = inst.targets().len();
    let nc = inst.contexts().len();
    let pt = FinSet::product(programs, inst.targets());
    let ptc = FinSet::product(&pt, inst.contexts());
    let target_map = FinRel::from_fn(&pt, inst.targets(), |k| Some(system_image[k % nt]));
    let context_map = FinRel::from_fn(&ptc, inst.contexts(), |k| Some(config_image[k % nc]));
    Processing::from_parts("spin-permutation", programs, target_map, context_map, inst)
}

/// `|sp(H)_{≤Δ}|` per target.
pub fn reduced_spectrum_sizes(spin: &SpinTcc, meter: &mut Meter) -> Result<Vec<usize>> {
    spin.systems
        .iter()
        .map(|s| Ok(reduced(&s.spectrum(meter)?, &s.delta).len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(s: &SpinSystem, a: &[usize]) -> SpinConfiguration {
        SpinConfiguration {
            complex: s.complex.clone(),
            levels: s.levels,
            assignment: a.to_vec(),
        }
    }

    #[test]
    fn field_energies() {
        let s = field_system(3);
        assert_eq!(s.energy(&config(&s, &[0, 0, 0])).unwrap(), int(0));
        assert_eq!(s.energy(&config(&s, &[1, 0, 1])).unwrap(), int(2));
    }

    #[test]
    fn field_spectra() {
        let mut m = Meter::default();
        for n in 0..=6 {
            let sp = field_system(n).spectrum(&mut m).unwrap();
            assert_eq!(sp, (0..=n as i64).map(int).collect());
        }
        assert!(reduced(&field_system(2).spectrum(&mut m).unwrap(), &int(-1)).is_empty());
    }

    #[test]
    fn ising_edge() {
        let v = FinSet::numbered("V", "v", 2);
        let k = SimplicialComplex::new(v, vec![vec![0, 1]]).unwrap();
        let s = ising("e", k, &[int(1)], &[int(0), int(0)], int(5)).unwrap();
        assert_eq!(s.energy(&config(&s, &[0, 1])).unwrap(), int(-1));
        assert_eq!(s.energy(&config(&s, &[1, 1])).unwrap(), int(1));
    }

    #[test]
    fn size_measures() {
        assert_eq!(field_system(3).size_measure(), 6);
        assert_eq!(size_measure(&SimplicialComplex::empty(), 2), 0);
        let k = SimplicialComplex::new(FinSet::numbered("V", "v", 2), vec![vec![0, 1]]).unwrap();
        assert_eq!(size_measure(&k, 3), 9);
    }

    #[test]
    fn facets_must_be_antichain() {
        let v = FinSet::numbered("V", "v", 2);
        assert!(SimplicialComplex::new(v, vec![vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn eval_threshold_and_brel() {
        let mut m = Meter::default();
        let mut s = field_system(2);
        s.delta = int(1);
        assert!(spin_eval(&s, &config(&s, &[1, 1]), &mut m)
            .unwrap()
            .is_none());
        let b = spin_eval(&s, &config(&s, &[1, 0]), &mut m)
            .unwrap()
            .unwrap();
        assert!(spin_brel(&b, &b));
        let mut higher = b.clone();
        higher.delta = int(2);
        assert!(!spin_brel(&b, &higher));
    }

    #[test]
    fn spin_instance_is_well_formed() {
        let spin = build_spin_tcc(
            "two",
            vec![field_system(1), field_system(2)],
            &mut Meter::default(),
        )
        .unwrap();
        assert_eq!(spin.instance.contexts().len(), 2 + 4);
        assert!(spin.instance.eval().is_functional());
        assert_eq!(spin.instance.contexts().label(0), "K0/0");
        let empty = build_spin_tcc("e", vec![field_system(0)], &mut Meter::default()).unwrap();
        assert_eq!(empty.instance.contexts().label(0), "K0/_");
    }

    #[test]
    fn permutation_preserves_energy() {
        let v = FinSet::numbered("V", "v", 3);
        let k = SimplicialComplex::new(v, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let s = ising(
            "path",
            k,
            &[int(1), int(2)],
            &[int(0), int(1), int(3)],
            int(10),
        )
        .unwrap();
        let pi = [2, 1, 0];
        let moved = s.permuted(&pi).unwrap();
        let mut a = vec![0usize; 3];
        loop {
            let mut b = vec![0; 3];
            for (v, &x) in a.iter().enumerate() {
                b[pi[v]] = x;
            }
            assert_eq!(s.energy_unchecked(&a), moved.energy_unchecked(&b));
            if !next_assignment(&mut a, 2) {
                break;
            }
        }
        assert!(s.permuted(&[1, 0, 2]).is_err());
        assert!(s.permuted(&[0, 0, 2]).is_err());
    }
}
