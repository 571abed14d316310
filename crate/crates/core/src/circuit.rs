//! Backend-agnostic gate and circuit representation.
//!
//! A [`Gate`] is a name, ordered target and control qubit lists, an optional
//! parameter (a number or a free symbol) and a variational tag. Names are stored
//! uppercase and are not checked against any gate set here: unknown names are
//! only rejected when a circuit is simulated or translated.
//!
//! Circuit equality is syntactic: two circuits are equal when their ordered gate
//! lists are equal, with exact parameter comparison. It says nothing about the
//! unitaries being equal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("gate {name} has no target qubit")]
    NoTargets { name: String },
    #[error("gate {name} uses qubit {qubit} more than once")]
    RepeatedQubit { name: String, qubit: usize },
    #[error("negative qubit index {index} in gate {name}")]
    NegativeIndex { name: String, index: i64 },
    #[error("gate {name} has no inverse rule")]
    UnsupportedInverse { name: String },
    #[error("gate {name} has unbound parameter '{symbol}'")]
    UnboundParameter { name: String, symbol: String },
    #[error("expected {expected} variational parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
}

/// Gate parameter: a value in radians or a free symbol awaiting binding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Parameter {
    Value(f64),
    Symbol(String),
}

impl Parameter {
    pub fn value(&self) -> Option<f64> {
        match self {
            Parameter::Value(v) => Some(*v),
            Parameter::Symbol(_) => None,
        }
    }
}

impl From<f64> for Parameter {
    fn from(v: f64) -> Self {
        Parameter::Value(v)
    }
}

impl From<&str> for Parameter {
    fn from(s: &str) -> Self {
        Parameter::Symbol(s.to_string())
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Value(v) => write!(f, "{v:?}"),
            Parameter::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    name: String,
    targets: Vec<usize>,
    controls: Vec<usize>,
    pub parameter: Option<Parameter>,
    pub is_variational: bool,
}

impl Gate {
    /// Builds a gate after checking the qubit lists: at least one target, and no
    /// qubit repeated within or across targets and controls.
    pub fn new(name: &str, targets: &[usize], controls: &[usize]) -> Result<Gate, CircuitError> {
        let name = name.to_uppercase();
        if targets.is_empty() {
            return Err(CircuitError::NoTargets { name });
        }
        let mut seen = BTreeSet::new();
        for &q in targets.iter().chain(controls) {
            if !seen.insert(q) {
                return Err(CircuitError::RepeatedQubit { name, qubit: q });
            }
        }
        Ok(Gate {
            name,
            targets: targets.to_vec(),
            controls: controls.to_vec(),
            parameter: None,
            is_variational: false,
        })
    }

    /// Same as [`Gate::new`] but from signed indices, as found in JSON input.
    pub fn from_signed(
        name: &str,
        targets: &[i64],
        controls: &[i64],
    ) -> Result<Gate, CircuitError> {
        let convert = |list: &[i64]| -> Result<Vec<usize>, CircuitError> {
            list.iter()
                .map(|&i| {
                    usize::try_from(i).map_err(|_| CircuitError::NegativeIndex {
                        name: name.to_uppercase(),
                        index: i,
                    })
                })
                .collect()
        };
        Gate::new(name, &convert(targets)?, &convert(controls)?)
    }

    pub fn single(name: &str, qubit: usize) -> Gate {
        Gate::new(name, &[qubit], &[]).expect("single-qubit gate is always valid")
    }

    /// Controlled-NOT. Panics when `control == target`.
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::new("CNOT", &[target], &[control]).expect("control and target must differ")
    }

    pub fn rotation(name: &str, qubit: usize, angle: f64) -> Gate {
        Gate::single(name, qubit).with_parameter(angle)
    }

    pub fn with_parameter(mut self, parameter: impl Into<Parameter>) -> Gate {
        self.parameter = Some(parameter.into());
        self
    }

    pub fn variational(mut self) -> Gate {
        self.is_variational = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    /// Controls followed by targets.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    pub fn n_qubits(&self) -> usize {
        self.targets.len() + self.controls.len()
    }

    /// Number of qubits this gate alone requires (highest index + 1).
    pub fn width(&self) -> usize {
        self.qubits().max().map_or(0, |q| q + 1)
    }

    /// Numeric parameter value, failing on an unbound symbol.
    pub fn parameter_value(&self) -> Result<Option<f64>, CircuitError> {
        match &self.parameter {
            None => Ok(None),
            Some(Parameter::Value(v)) => Ok(Some(*v)),
            Some(Parameter::Symbol(s)) => Err(CircuitError::UnboundParameter {
                name: self.name.clone(),
                symbol: s.clone(),
            }),
        }
    }

    /// Inverse of this gate. Rotations have their angle negated, S/T swap with
    /// their adjoints and self-inverse gates are returned unchanged.
    pub fn inverse(&self) -> Result<Gate, CircuitError> {
        let mut inv = self.clone();
        match self.name.as_str() {
            "H" | "X" | "Y" | "Z" | "CNOT" | "CX" | "CY" | "CZ" | "SWAP" | "CSWAP" => {}
            "S" => inv.name = "SDAG".into(),
            "SDAG" => inv.name = "S".into(),
            "T" => inv.name = "TDAG".into(),
            "TDAG" => inv.name = "T".into(),
            "RX" | "RY" | "RZ" | "PHASE" | "CRX" | "CRY" | "CRZ" | "CPHASE" => {
                let angle =
                    self.parameter_value()?
                        .ok_or_else(|| CircuitError::UnsupportedInverse {
                            name: self.name.clone(),
                        })?;
                inv.parameter = Some(Parameter::Value(-angle));
            }
            _ => {
                return Err(CircuitError::UnsupportedInverse {
                    name: self.name.clone(),
                })
            }
        }
        Ok(inv)
    }

    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            name: self.name.clone(),
            targets: self.targets.iter().map(|&q| map(q)).collect(),
            controls: self.controls.iter().map(|&q| map(q)).collect(),
            parameter: self.parameter.clone(),
            is_variational: self.is_variational,
        }
    }
}

fn fmt_index_list(list: &[usize]) -> String {
    match list {
        [q] => q.to_string(),
        _ => {
            let inner: Vec<String> = list.iter().map(|q| q.to_string()).collect();
            alloc::format!("[{}]", inner.join(", "))
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10}target : {}   ",
            self.name,
            fmt_index_list(&self.targets)
        )?;
        if !self.controls.is_empty() {
            write!(f, "control : {}   ", fmt_index_list(&self.controls))?;
        }
        if let Some(p) = &self.parameter {
            write!(f, "parameter : {p}")?;
        }
        if self.is_variational {
            f.write_str("\t (variational)")?;
        }
        Ok(())
    }
}

/// Ordered list of gates with an optional declared width.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    gates: Vec<Gate>,
    declared_width: Option<usize>,
}

/// Result of [`Circuit::split`]: one circuit per independent qubit cluster, and
/// where each original qubit went.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCircuit {
    pub parts: Vec<Circuit>,
    /// original qubit -> (part index, qubit index inside that part)
    pub qubit_map: BTreeMap<usize, (usize, usize)>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Circuit {
        Circuit {
            gates,
            declared_width: None,
        }
    }

    pub fn with_width(gates: Vec<Gate>, width: usize) -> Circuit {
        Circuit {
            gates,
            declared_width: Some(width),
        }
    }

    pub fn add_gate(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn declared_width(&self) -> Option<usize> {
        self.declared_width
    }

    pub fn set_declared_width(&mut self, width: Option<usize>) {
        self.declared_width = width;
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn width(&self) -> usize {
        let used = self.gates.iter().map(Gate::width).max().unwrap_or(0);
        used.max(self.declared_width.unwrap_or(0))
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.name.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn is_variational(&self) -> bool {
        self.gates.iter().any(|g| g.is_variational)
    }

    pub fn variational_gates(&self) -> Vec<&Gate> {
        self.gates.iter().filter(|g| g.is_variational).collect()
    }

    /// Mutable view on the variational gates, in circuit order.
    pub fn variational_gates_mut(&mut self) -> Vec<&mut Gate> {
        self.gates.iter_mut().filter(|g| g.is_variational).collect()
    }

    /// Number of gates acting on exactly two qubits (targets plus controls).
    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.n_qubits() == 2).count()
    }

    /// Assigns `values` to the variational gates in order.
    pub fn bind_parameters(&mut self, values: &[f64]) -> Result<(), CircuitError> {
        let mut gates = self.variational_gates_mut();
        if gates.len() != values.len() {
            return Err(CircuitError::ParameterCount {
                expected: gates.len(),
                got: values.len(),
            });
        }
        for (g, &v) in gates.iter_mut().zip(values) {
            g.parameter = Some(Parameter::Value(v));
        }
        Ok(())
    }

    /// Replaces every occurrence of `symbol` by `value`; returns how many gates changed.
    pub fn substitute(&mut self, symbol: &str, value: f64) -> usize {
        let mut n = 0;
        for g in &mut self.gates {
            if matches!(&g.parameter, Some(Parameter::Symbol(s)) if s == symbol) {
                g.parameter = Some(Parameter::Value(value));
                n += 1;
            }
        }
        n
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        self.gates
            .iter()
            .filter_map(|g| match &g.parameter {
                Some(Parameter::Symbol(s)) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn concat(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        let declared = match (self.declared_width, other.declared_width) {
            (None, None) => None,
            _ => Some(self.width().max(other.width())),
        };
        Circuit {
            gates,
            declared_width: declared,
        }
    }

    pub fn repeat(&self, n: usize) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len() * n);
        for _ in 0..n {
            gates.extend(self.gates.iter().cloned());
        }
        Circuit {
            gates,
            declared_width: self.declared_width,
        }
    }

    pub fn inverse(&self) -> Result<Circuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::inverse)
            .collect::<Result<_, _>>()?;
        Ok(Circuit {
            gates,
            declared_width: self.declared_width,
        })
    }

    /// Relabels every qubit through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Circuit {
        Circuit {
            gates: self.gates.iter().map(|g| g.remapped(&map)).collect(),
            declared_width: None,
        }
    }

    /// Breaks the circuit into clusters of qubits never linked by a multi-qubit
    /// gate. Parts come out ordered by their smallest original qubit and keep the
    /// relative order of their qubits; idle qubits are dropped.
    pub fn split(&self) -> SplitCircuit {
        let used: BTreeSet<usize> = self.gates.iter().flat_map(|g| g.qubits()).collect();
        let mut parent: BTreeMap<usize, usize> = used.iter().map(|&q| (q, q)).collect();

        fn find(parent: &mut BTreeMap<usize, usize>, q: usize) -> usize {
            let mut root = q;
            while parent[&root] != root {
                root = parent[&root];
            }
            let mut cur = q;
            while parent[&cur] != root {
                let next = parent[&cur];
                parent.insert(cur, root);
                cur = next;
            }
            root
        }

        for g in &self.gates {
            let mut qs = g.qubits();
            if let Some(first) = qs.next() {
                for q in qs {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, q));
                    if a != b {
                        // keep the smaller index as root
                        parent.insert(a.max(b), a.min(b));
                    }
                }
            }
        }

        let mut component_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for &q in &used {
            let root = find(&mut parent, q);
            let idx = *component_of_root.entry(root).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[idx].push(q);
        }

        let mut qubit_map = BTreeMap::new();
        for (c, qs) in members.iter().enumerate() {
            for (new, &old) in qs.iter().enumerate() {
                qubit_map.insert(old, (c, new));
            }
        }

        let mut parts: Vec<Circuit> = members.iter().map(|_| Circuit::default()).collect();
        for g in &self.gates {
            if let Some(q) = g.qubits().next() {
                let (c, _) = qubit_map[&q];
                parts[c].gates.push(g.remapped(|old| qubit_map[&old].1));
            }
        }
        SplitCircuit { parts, qubit_map }
    }

    /// Places circuits side by side: circuit `i` is shifted by the summed widths
    /// of the circuits before it.
    pub fn stack(circuits: &[Circuit]) -> Circuit {
        let mut offset = 0;
        let mut gates = Vec::new();
        for c in circuits {
            gates.extend(c.gates.iter().map(|g| g.remapped(|q| q + offset)));
            offset += c.width();
        }
        Circuit {
            gates,
            declared_width: Some(offset),
        }
    }
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Circuit) -> bool {
        self.gates == other.gates
    }
}

impl Add for Circuit {
    type Output = Circuit;
    fn add(self, rhs: Circuit) -> Circuit {
        self.concat(&rhs)
    }
}

impl<'a> Add<&'a Circuit> for &'a Circuit {
    type Output = Circuit;
    fn add(self, rhs: &Circuit) -> Circuit {
        self.concat(rhs)
    }
}

impl Mul<usize> for &Circuit {
    type Output = Circuit;
    fn mul(self, n: usize) -> Circuit {
        self.repeat(n)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Circuit object. Size {} \n", self.size())?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

// JSON interchange: {"width": int?, "gates": [{name, targets, controls, parameter, variational}]}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    name: String,
    targets: Vec<i64>,
    #[serde(default)]
    controls: Vec<i64>,
    #[serde(default)]
    parameter: Option<Parameter>,
    #[serde(default)]
    variational: bool,
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GateRepr {
            name: self.name.clone(),
            targets: self.targets.iter().map(|&q| q as i64).collect(),
            controls: self.controls.iter().map(|&q| q as i64).collect(),
            parameter: self.parameter.clone(),
            variational: self.is_variational,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Gate, D::Error> {
        let r = GateRepr::deserialize(d)?;
        let mut g = Gate::from_signed(&r.name, &r.targets, &r.controls)
            .map_err(serde::de::Error::custom)?;
        g.parameter = r.parameter;
        g.is_variational = r.variational;
        Ok(g)
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Circuit", 2)?;
        st.serialize_field("width", &self.width())?;
        st.serialize_field("gates", &self.gates)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Circuit, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(default)]
            width: Option<usize>,
            gates: Vec<Gate>,
        }
        let r = Repr::deserialize(d)?;
        Ok(Circuit {
            gates: r.gates,
            declared_width: r.width,
        })
    }
}
