use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ff::{ExtensionBasis, Field, FieldElement};
use crate::ir::{Circuit, CircuitBuilder, Gate, GateId};

/// Gadget constant: every gate of the input costs at most `C·k³` gates.
pub const SIMULATION_CONSTANT: usize = 5;

/// A circuit over the base field whose output `j` computes the coordinate
/// `f_j` of `f = Σ_j f_j β_j`.
#[derive(Clone, Debug)]
pub struct SimulatedExtension {
    pub circuit: Circuit,
    pub k: usize,
    /// The constant `C` of the size bound `C·k³·s`.
    pub constant: usize,
    /// The basis `β_0..β_{k-1}`: powers of the generator of the extension.
    pub basis: Vec<FieldElement>,
}

/// `coef · gate`, or zero.
type Coord = Option<(GateId, FieldElement)>;

struct Simulator {
    b: CircuitBuilder,
    basis: ExtensionBasis,
    k: usize,
    /// `structure[a][c][r]`: coordinate `r` of `β_a β_c`
    structure: Vec<Vec<Vec<FieldElement>>>,
    one_gate: GateId,
}

impl Simulator {
    /// Column `j` holds the coordinates of `λ β_j`.
    fn matrix(&self, lambda: &FieldElement) -> Vec<Vec<FieldElement>> {
        let cols: Vec<Vec<FieldElement>> = self
            .basis
            .basis()
            .iter()
            .map(|bj| self.basis.coordinates(&(lambda * bj)))
            .collect();
        (0..self.k).map(|i| (0..self.k).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Balanced sum of `Σ c·g`, merging repeated gates and dropping zeros.
    fn combine(&mut self, terms: Vec<(GateId, FieldElement)>) -> Coord {
        let mut merged: BTreeMap<GateId, FieldElement> = BTreeMap::new();
        for (g, c) in terms {
            if c.is_zero() {
                continue;
            }
            let e = merged.entry(g).or_insert_with(|| c.field().zero());
            *e += &c;
        }
        let mut level: Vec<(GateId, FieldElement)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                match pair {
                    [(a, ca), (b, cb)] => {
                        let g = self.b.add_with(*a, ca.clone(), *b, cb.clone());
                        next.push((g, self.b.field().one()));
                    }
                    [single] => next.push(single.clone()),
                    _ => unreachable!(),
                }
            }
            level = next;
        }
        level.pop()
    }

    /// Coordinates of `λ · w`.
    fn scaled(&mut self, lambda: &FieldElement, w: &[Coord]) -> Vec<Coord> {
        let m = self.matrix(lambda);
        (0..self.k)
            .map(|i| {
                let terms = w
                    .iter()
                    .enumerate()
                    .filter_map(|(j, c)| c.as_ref().map(|(g, c)| (*g, &m[i][j] * c)))
                    .collect();
                self.combine(terms)
            })
            .collect()
    }

    fn wire(&mut self, g: &Gate, wires: &[Vec<Coord>]) -> Vec<Coord> {
        let k = self.k;
        match g {
            Gate::Input(i) => {
                let x = self.b.input(*i);
                let one = self.b.field().one();
                let mut w = vec![None; k];
                w[0] = Some((x, one));
                w
            }
            Gate::Const(alpha) => self
                .basis
                .coordinates(alpha)
                .into_iter()
                .map(|c| (!c.is_zero()).then_some((self.one_gate, c)))
                .collect(),
            Gate::Add { l, lc, r, rc } => {
                let u = self.scaled(lc, &wires[*l]);
                let w = self.scaled(rc, &wires[*r]);
                u.into_iter()
                    .zip(w)
                    .map(|(a, b)| self.combine(a.into_iter().chain(b).collect()))
                    .collect()
            }
            Gate::Mul { l, lc, r, rc } => {
                let u = self.scaled(lc, &wires[*l]);
                let w = self.scaled(rc, &wires[*r]);
                let mut acc: Vec<Vec<(GateId, FieldElement)>> = vec![Vec::new(); k];
                for (a, ua) in u.iter().enumerate() {
                    let Some((ga, ca)) = ua else { continue };
                    for (c, wc) in w.iter().enumerate() {
                        let Some((gc, cc)) = wc else { continue };
                        let prod = self.b.mul_with(*ga, ca.clone(), *gc, cc.clone());
                        for (rr, t) in self.structure[a][c].iter().enumerate() {
                            if !t.is_zero() {
                                acc[rr].push((prod, t.clone()));
                            }
                        }
                    }
                }
                acc.into_iter().map(|terms| self.combine(terms)).collect()
            }
        }
    }
}

/// Simulate `phi`, a circuit over a degree-`k` extension of `base`, by a
/// circuit over `base` with `k` outputs. Size is at most `5·k³·s`.
pub fn simulate_extension(phi: &Circuit, base: &Field) -> Result<SimulatedExtension> {
    let ext = phi.field();
    if base.p() != ext.p() || !ext.degree().is_multiple_of(base.degree()) {
        return Err(Error::usage(format!(
            "extension degree {} is not a multiple of the base degree {}",
            ext.degree(),
            base.degree()
        )));
    }
    let out = phi.single_output()?;
    let basis = ExtensionBasis::new(base, ext)?;
    let k = basis.k();
    let structure = (0..k)
        .map(|a| {
            (0..k)
                .map(|c| basis.coordinates(&(&basis.basis()[a] * &basis.basis()[c])))
                .collect()
        })
        .collect();
    let mut b = CircuitBuilder::new(base.clone(), phi.nvars());
    let one_gate = b.constant(base.one());
    let mut sim = Simulator {
        b,
        basis,
        k,
        structure,
        one_gate,
    };
    let mut wires: Vec<Vec<Coord>> = Vec::with_capacity(phi.size());
    for g in phi.gates() {
        let w = sim.wire(g, &wires);
        wires.push(w);
    }
    let mut outputs = Vec::with_capacity(k);
    for coord in wires[out].clone() {
        let g = match coord {
            None => sim.b.constant(base.zero()),
            Some((g, c)) => sim.b.scale(g, c),
        };
        outputs.push(g);
    }
    let basis = sim.basis.basis().to_vec();
    let circuit = sim.b.finish(outputs)?.pruned();
    let bound = SIMULATION_CONSTANT * k.pow(3) * phi.size();
    if circuit.size() > bound {
        return Err(Error::Internal(format!(
            "simulation has size {}, above {SIMULATION_CONSTANT}·k³·s = {bound}",
            circuit.size()
        )));
    }
    Ok(SimulatedExtension {
        circuit,
        k,
        constant: SIMULATION_CONSTANT,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{expand_circuit, ExpandCaps, SparsePoly};
    use rand::SeedableRng;

    fn recombined(sim: &SimulatedExtension, ext: &Field) -> SparsePoly {
        let base = sim.circuit.field();
        let emb = crate::ff::FieldEmbedding::new(base, ext).unwrap();
        let coords = expand_circuit(&sim.circuit, &ExpandCaps::default()).unwrap();
        let mut acc = SparsePoly::zero(ext, sim.circuit.nvars());
        for (c, beta) in coords.iter().zip(&sim.basis) {
            acc = acc.add(&c.embed(&emb).unwrap().scale(beta)).unwrap();
        }
        acc
    }

    #[test]
    fn constant_generator_of_f4() {
        let f4 = Field::new(2, 2).unwrap();
        let f2 = Field::prime(2).unwrap();
        let mut b = CircuitBuilder::new(f4.clone(), 1);
        let w = b.constant(f4.generator_x());
        let phi = b.finish(vec![w]).unwrap();
        let sim = simulate_extension(&phi, &f2).unwrap();
        let coords = expand_circuit(&sim.circuit, &ExpandCaps::default()).unwrap();
        assert!(coords[0].is_zero());
        assert_eq!(coords[1], SparsePoly::constant(&f2, 1, f2.one()));
    }

    #[test]
    fn cube_of_generator_is_one() {
        let f4 = Field::new(2, 2).unwrap();
        let f2 = Field::prime(2).unwrap();
        let w = f4.generator_x();
        let mut b = CircuitBuilder::new(f4.clone(), 1);
        let x = b.input(0);
        let c1 = b.constant(w.clone());
        let c2 = b.constant(&w * &w);
        let m = b.mul(c1, c2);
        let out = b.mul(m, x);
        let phi = b.finish(vec![out]).unwrap();
        let sim = simulate_extension(&phi, &f2).unwrap();
        let coords = expand_circuit(&sim.circuit, &ExpandCaps::default()).unwrap();
        assert_eq!(coords[0], SparsePoly::var(&f2, 1, 0));
        assert!(coords[1].is_zero());
    }

    #[test]
    fn random_circuits_recombine() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (ext, base) in [
            (Field::new(3, 2).unwrap(), Field::prime(3).unwrap()),
            (Field::new(2, 4).unwrap(), Field::new(2, 2).unwrap()),
            (Field::new(2, 3).unwrap(), Field::prime(2).unwrap()),
        ] {
            for _ in 0..10 {
                let phi = crate::ir::random::random_circuit(&ext, 2, 10, 6, &mut rng);
                let sim = simulate_extension(&phi, &base).unwrap();
                assert!(sim.circuit.size() <= sim.constant * sim.k.pow(3) * phi.size());
                let want = expand_circuit(&phi, &ExpandCaps::default()).unwrap().remove(0);
                assert_eq!(recombined(&sim, &ext), want);
            }
        }
    }

    #[test]
    fn degree_must_divide() {
        let f8 = Field::new(2, 3).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        let mut b = CircuitBuilder::new(f8, 1);
        let x = b.input(0);
        let phi = b.finish(vec![x]).unwrap();
        assert!(matches!(simulate_extension(&phi, &f4), Err(Error::Usage(_))));
    }
}
