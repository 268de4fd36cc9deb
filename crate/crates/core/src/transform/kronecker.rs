use crate::error::{Error, Result};
use crate::ir::{Circuit, CircuitBuilder};

/// Substitute `y_{i,j} ↦ x_i^{b^j}` into `c`, whose variable `i·K + j` is
/// `y_{i,j}`, giving a circuit on `m` variables. The powers of each `x_i`
/// form one shared ladder of `K - 1` steps, each costing at most
/// `⌊log₂ b⌋ + popcount(b) - 1` products; gates no output uses are pruned.
pub fn kronecker_substitution_circuit(c: &Circuit, m: usize, b: u32) -> Result<Circuit> {
    if b < 2 {
        return Err(Error::usage("Kronecker base must be at least 2"));
    }
    if m == 0 || !c.nvars().is_multiple_of(m) {
        return Err(Error::usage(format!(
            "circuit arity {} is not a multiple of {m} variables",
            c.nvars()
        )));
    }
    let k = c.nvars() / m;
    let mut builder = CircuitBuilder::new(c.field().clone(), m);
    let mut inputs = Vec::with_capacity(c.nvars());
    for i in 0..m {
        let mut g = builder.input(i);
        inputs.push(g);
        for _ in 1..k {
            g = builder.power(g, b as u64);
            inputs.push(g);
        }
    }
    let ids = builder.splice(c, &inputs)?;
    let outputs = c.outputs().iter().map(|&o| ids[o]).collect();
    Ok(builder.finish(outputs)?.pruned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::ir::parse_device;
    use crate::poly::{expand_circuit, kronecker_encode, ExpandCaps, SparsePoly};

    #[test]
    fn two_digit_example() {
        // y1·y2 + y2 + 1 over F_2
        let text = "field p 2 ext 1 modulus [0 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [1]\ngate 3 add 2 [1] 1 [1]\ngate 4 const [1]\ngate 5 add 3 [1] 4 [1]\noutput 5\n";
        let c = parse_device(text).unwrap().to_circuit().unwrap();
        let s = kronecker_substitution_circuit(&c, 1, 2).unwrap();
        let f = Field::prime(2).unwrap();
        let want = SparsePoly::from_terms(
            &f,
            1,
            vec![(vec![3], f.one()), (vec![2], f.one()), (vec![0], f.one())],
        )
        .unwrap();
        assert_eq!(expand_circuit(&s, &ExpandCaps::default()).unwrap()[0], want);
    }

    #[test]
    fn single_digit_is_identity() {
        let text = "field p 3 ext 1 modulus [0 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [2]\noutput 2\n";
        let c = parse_device(text).unwrap().to_circuit().unwrap();
        for b in [2, 3, 5] {
            let s = kronecker_substitution_circuit(&c, 2, b).unwrap();
            let caps = ExpandCaps::default();
            assert_eq!(expand_circuit(&s, &caps).unwrap(), expand_circuit(&c, &caps).unwrap());
            assert_eq!(s.size(), c.size());
        }
    }

    #[test]
    fn encoded_round_trip_and_gate_budget() {
        let f = Field::prime(5).unwrap();
        let g = SparsePoly::from_terms(
            &f,
            2,
            vec![(vec![30, 7], f.from_int(2)), (vec![1, 24], f.one()), (vec![0, 0], f.from_int(3))],
        )
        .unwrap();
        for b in [2u32, 3, 5] {
            let (enc, k) = kronecker_encode(&g, b, None).unwrap();
            let c = Circuit::from_poly(&enc).unwrap();
            let s = kronecker_substitution_circuit(&c, 2, b).unwrap();
            assert_eq!(expand_circuit(&s, &ExpandCaps::default()).unwrap()[0], g);
            let mk = 2 * k as usize;
            let log = (32 - (b - 1).leading_zeros()) as usize;
            assert!(s.size() <= c.size() + mk * log + mk, "b {b}: {} vs {}", s.size(), c.size());
        }
    }
}
