//! Subtractive ONIOM: E = E_all^low + Σ_i (E_i^high − E_i^low).

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::geometry::{Atom, Geometry};
use super::FragmentError;
use crate::vqe::ResourceReport;

/// Bond severed when carving a fragment. The cap atom replaces `leaving`
/// at `r_staying + factor (r_leaving − r_staying)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub staying: usize,
    pub leaving: usize,
    pub factor: f64,
    #[serde(default = "default_species")]
    pub species: String,
}

fn default_species() -> String {
    "H".to_string()
}

impl Link {
    pub fn new(staying: usize, leaving: usize, factor: f64, species: &str) -> Link {
        Link {
            staying,
            leaving,
            factor,
            species: species.to_string(),
        }
    }

    /// The same bond seen from the other side, for capping the complement.
    pub fn reversed(&self) -> Link {
        Link {
            staying: self.leaving,
            leaving: self.staying,
            factor: self.factor,
            species: self.species.clone(),
        }
    }

    pub fn cap_position(&self, g: &Geometry) -> [f64; 3] {
        let a = g.atoms[self.staying].position;
        let b = g.atoms[self.leaving].position;
        core::array::from_fn(|k| a[k] + self.factor * (b[k] - a[k]))
    }

    fn invalid(&self, message: &str) -> FragmentError {
        FragmentError::InvalidLink {
            staying: self.staying,
            leaving: self.leaving,
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub name: String,
    #[serde(default)]
    pub options: Value,
}

impl SolverSpec {
    pub fn new(name: &str, options: Value) -> SolverSpec {
        SolverSpec {
            name: name.to_string(),
            options,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentSpec {
    /// Atom indices of the fragment; empty selects the whole system.
    #[serde(default)]
    pub selected_atoms: Vec<usize>,
    #[serde(default)]
    pub broken_links: Vec<Link>,
    #[serde(default)]
    pub charge: i64,
    #[serde(default)]
    pub spin: i64,
    pub solver_low: SolverSpec,
    #[serde(default)]
    pub solver_high: Option<SolverSpec>,
}

impl FragmentSpec {
    pub fn is_whole_system(&self) -> bool {
        self.selected_atoms.is_empty()
    }
}

/// Selected atoms in the given order, followed by one cap per link.
pub fn build_capped_fragment(g: &Geometry, f: &FragmentSpec) -> Result<Geometry, FragmentError> {
    g.validate()?;
    let n = g.len();
    if f.is_whole_system() {
        if let Some(l) = f.broken_links.first() {
            return Err(l.invalid("whole-system fragment cannot break bonds"));
        }
        return Ok(Geometry {
            atoms: g.atoms.clone(),
            charge: f.charge,
            spin: f.spin,
        });
    }
    let mut atoms = Vec::with_capacity(f.selected_atoms.len() + f.broken_links.len());
    for (k, &i) in f.selected_atoms.iter().enumerate() {
        if i >= n {
            return Err(FragmentError::AtomIndex {
                index: i,
                n_atoms: n,
            });
        }
        if f.selected_atoms[..k].contains(&i) {
            return Err(FragmentError::DuplicateAtom(i));
        }
        atoms.push(g.atoms[i].clone());
    }
    for l in &f.broken_links {
        for i in [l.staying, l.leaving] {
            if i >= n {
                return Err(FragmentError::AtomIndex {
                    index: i,
                    n_atoms: n,
                });
            }
        }
        if l.staying == l.leaving {
            return Err(l.invalid("indices must differ"));
        }
        if !(l.factor > 0.0 && l.factor <= 1.0) {
            return Err(l.invalid("factor must lie in (0, 1]"));
        }
        if !f.selected_atoms.contains(&l.staying) {
            return Err(l.invalid("staying atom is not in the fragment"));
        }
        if f.selected_atoms.contains(&l.leaving) {
            return Err(l.invalid("leaving atom is inside the fragment"));
        }
        atoms.push(Atom::new(&l.species, l.cap_position(g))?);
    }
    Ok(Geometry {
        atoms,
        charge: f.charge,
        spin: f.spin,
    })
}

pub fn oniom_energy(e_all_low: f64, pairs: &[(f64, f64)]) -> f64 {
    pairs
        .iter()
        .fold(e_all_low, |e, (high, low)| e + (high - low))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentEnergy {
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resources: Option<ResourceReport>,
}

impl FragmentEnergy {
    pub fn classical(energy: f64) -> FragmentEnergy {
        FragmentEnergy {
            energy,
            resources: None,
        }
    }
}

pub trait FragmentSolver {
    fn solve(&self, geometry: &Geometry, options: &Value) -> Result<FragmentEnergy, FragmentError>;
}

/// Returns tabulated energies: `{"energy": e}` for a fixed value or
/// `{"per_atom": {"H": e_H, ...}}` summed over the fragment's atoms.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubSolver;

impl FragmentSolver for StubSolver {
    fn solve(&self, geometry: &Geometry, options: &Value) -> Result<FragmentEnergy, FragmentError> {
        if let Some(e) = options.get("energy").and_then(Value::as_f64) {
            return Ok(FragmentEnergy::classical(e));
        }
        if let Some(table) = options.get("per_atom").and_then(Value::as_object) {
            let mut e = 0.0;
            for a in &geometry.atoms {
                e += table
                    .get(&a.symbol)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| {
                        FragmentError::MissingEnergy(alloc::format!(
                            "stub has no entry for {}",
                            a.symbol
                        ))
                    })?;
            }
            return Ok(FragmentEnergy::classical(e));
        }
        Err(FragmentError::MissingEnergy(
            "stub options need 'energy' or 'per_atom'".into(),
        ))
    }
}

/// Named fragment solvers. `SolverRegistry::default()` knows "stub".
pub struct SolverRegistry {
    solvers: BTreeMap<String, Box<dyn FragmentSolver>>,
}

impl Default for SolverRegistry {
    fn default() -> SolverRegistry {
        let mut r = SolverRegistry::empty();
        r.register("stub", StubSolver);
        r
    }
}

impl SolverRegistry {
    pub fn empty() -> SolverRegistry {
        SolverRegistry {
            solvers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &str, solver: impl FragmentSolver + 'static) {
        self.solvers.insert(name.to_string(), Box::new(solver));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.solvers.keys().map(String::as_str)
    }

    pub fn solve(&self, spec: &SolverSpec, g: &Geometry) -> Result<FragmentEnergy, FragmentError> {
        let solver = self
            .solvers
            .get(&spec.name)
            .ok_or_else(|| FragmentError::UnknownSolver(spec.name.clone()))?;
        solver.solve(g, &spec.options)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentResult {
    pub n_atoms: usize,
    pub e_low: FragmentEnergy,
    pub e_high: Option<FragmentEnergy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OniomResult {
    pub energy: f64,
    pub e_all_low: f64,
    /// Model fragments in input order; the whole system is not listed.
    pub fragments: Vec<FragmentResult>,
}

impl OniomResult {
    /// Reports of every fragment calculation that ran a quantum solver.
    pub fn resources(&self) -> Vec<ResourceReport> {
        self.fragments
            .iter()
            .flat_map(|f| [f.e_high.as_ref(), Some(&f.e_low)])
            .flatten()
            .filter_map(|e| e.resources)
            .collect()
    }
}

pub fn run_oniom(
    g: &Geometry,
    fragments: &[FragmentSpec],
    registry: &SolverRegistry,
) -> Result<OniomResult, FragmentError> {
    let whole: Vec<&FragmentSpec> = fragments.iter().filter(|f| f.is_whole_system()).collect();
    if whole.len() != 1 {
        return Err(FragmentError::WholeSystemCount(whole.len()));
    }
    let system = build_capped_fragment(g, whole[0])?;
    let e_all_low = registry.solve(&whole[0].solver_low, &system)?.energy;
    let mut results = Vec::new();
    let mut pairs = Vec::new();
    for (i, f) in fragments
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.is_whole_system())
    {
        let high = f
            .solver_high
            .as_ref()
            .ok_or(FragmentError::MissingHighSolver(i))?;
        let geom = build_capped_fragment(g, f)?;
        let e_high = registry.solve(high, &geom)?;
        let e_low = registry.solve(&f.solver_low, &geom)?;
        pairs.push((e_high.energy, e_low.energy));
        results.push(FragmentResult {
            n_atoms: geom.len(),
            e_low,
            e_high: Some(e_high),
        });
    }
    Ok(OniomResult {
        energy: oniom_energy(e_all_low, &pairs),
        e_all_low,
        fragments: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use serde_json::json;

    fn line() -> Geometry {
        Geometry::new(vec![
            Atom::new("C", [0.0, 0.0, 0.0]).unwrap(),
            Atom::new("C", [0.0, 0.0, 1.0]).unwrap(),
            Atom::new("O", [0.0, 0.0, 2.0]).unwrap(),
        ])
    }

    #[test]
    fn cap_interpolation() {
        let l = Link::new(0, 1, 0.709, "H");
        assert_eq!(l.cap_position(&line()), [0.0, 0.0, 0.709]);
        let l = Link::new(0, 1, 1.0, "H");
        assert_eq!(l.cap_position(&line()), [0.0, 0.0, 1.0]);
        // complement: cap sits along the same bond from atom 1
        let c = Link::new(0, 1, 0.709, "H").reversed().cap_position(&line());
        assert!((c[2] - 0.291).abs() < 1e-15);
    }

    #[test]
    fn capped_fragment() {
        let spec = FragmentSpec {
            selected_atoms: vec![1, 2],
            broken_links: vec![Link::new(1, 0, 0.5, "H")],
            charge: 0,
            spin: 0,
            solver_low: SolverSpec::new("stub", json!({"energy": 0.0})),
            solver_high: None,
        };
        let f = build_capped_fragment(&line(), &spec).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.atoms[2].symbol, "H");
        assert_eq!(f.atoms[2].position, [0.0, 0.0, 0.5]);

        let mut bad = spec.clone();
        bad.broken_links = vec![Link::new(0, 1, 0.5, "H")];
        assert!(matches!(
            build_capped_fragment(&line(), &bad),
            Err(FragmentError::InvalidLink { .. })
        ));
        bad.broken_links = vec![Link::new(1, 0, 1.5, "H")];
        assert!(matches!(
            build_capped_fragment(&line(), &bad),
            Err(FragmentError::InvalidLink { .. })
        ));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(oniom_energy(-10.0, &[(-1.5, -1.0)]), -10.5);
        assert_eq!(oniom_energy(-3.25, &[(-0.7, -0.7), (1.1, 1.1)]), -3.25);
    }

    #[test]
    fn stub_run() {
        let per_atom = json!({"per_atom": {"C": -37.5, "O": -74.75, "H": -0.5}});
        let fragments = vec![
            FragmentSpec {
                selected_atoms: vec![],
                broken_links: vec![],
                charge: 0,
                spin: 0,
                solver_low: SolverSpec::new("stub", per_atom.clone()),
                solver_high: None,
            },
            FragmentSpec {
                selected_atoms: vec![1, 2],
                broken_links: vec![Link::new(1, 0, 0.709, "H")],
                charge: 0,
                spin: 0,
                solver_low: SolverSpec::new("stub", per_atom),
                solver_high: Some(SolverSpec::new("stub", json!({"energy": -113.0}))),
            },
        ];
        let r = run_oniom(&line(), &fragments, &SolverRegistry::default()).unwrap();
        assert_eq!(r.e_all_low, -149.75);
        assert_eq!(r.energy, -149.75 + (-113.0 - (-37.5 - 74.75 - 0.5)));
        assert!(r.resources().is_empty());

        let mut unknown = fragments.clone();
        unknown[1].solver_high = Some(SolverSpec::new("ccsd", Value::Null));
        assert_eq!(
            run_oniom(&line(), &unknown, &SolverRegistry::default()).unwrap_err(),
            FragmentError::UnknownSolver("ccsd".into())
        );
        assert_eq!(
            run_oniom(&line(), &fragments[1..], &SolverRegistry::default()).unwrap_err(),
            FragmentError::WholeSystemCount(0)
        );
    }
}
