use thiserror::Error;

use super::FiniteAiSemiring;

#[derive(Debug, Clone, Error)]
#[error("unknown algebra {0:?} (known: S2, S7, S53, S4_124, S4_359, R6)")]
pub struct UnknownAlgebra(pub String);

const NAMES: [&str; 6] = ["S2", "S7", "S53", "S4_124", "S4_359", "R6"];

pub fn registry_names() -> &'static [&'static str] {
    &NAMES
}

// Tables are written with 1-based labels as printed and shifted to indices.
fn numeric(name: &str, add: &[&[usize]], mul: &[&[usize]]) -> FiniteAiSemiring {
    let shift = |t: &[&[usize]]| -> Vec<Vec<usize>> {
        t.iter().map(|r| r.iter().map(|&v| v - 1).collect()).collect()
    };
    FiniteAiSemiring::with_numeric_labels(name, shift(add), shift(mul))
        .expect("registry tables are valid ai-semirings")
}

pub fn registry(name: &str) -> Result<FiniteAiSemiring, UnknownAlgebra> {
    let s = match name {
        "S7" => {
            // element order 0, a, 1
            FiniteAiSemiring::new(
                "S7",
                vec!["0".into(), "a".into(), "1".into()],
                vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]],
                vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]],
            )
            .expect("S7 is valid")
        }
        "S2" => numeric(
            "S2",
            &[&[1, 1, 1], &[1, 2, 1], &[1, 1, 3]],
            &[&[1, 1, 1], &[1, 1, 1], &[1, 1, 2]],
        ),
        "S53" => numeric(
            "S53",
            &[&[1, 1, 3], &[1, 2, 3], &[3, 3, 3]],
            &[&[3, 1, 3], &[1, 2, 3], &[3, 3, 3]],
        ),
        "S4_124" => numeric(
            "S4_124",
            &[&[1, 1, 1, 1], &[1, 2, 2, 1], &[1, 2, 3, 1], &[1, 1, 1, 4]],
            &[&[1, 1, 1, 1], &[1, 1, 2, 1], &[1, 2, 3, 4], &[1, 1, 4, 2]],
        ),
        "S4_359" => numeric(
            "S4_359",
            &[&[1, 2, 1, 1], &[2, 2, 2, 2], &[1, 2, 3, 1], &[1, 2, 1, 4]],
            &[&[2, 2, 1, 2], &[2, 2, 2, 2], &[1, 2, 3, 4], &[2, 2, 4, 2]],
        ),
        "R6" => numeric(
            "R6",
            &[
                &[1, 2, 1, 1, 2, 1],
                &[2, 2, 2, 2, 2, 2],
                &[1, 2, 3, 1, 2, 1],
                &[1, 2, 1, 4, 2, 1],
                &[2, 2, 2, 2, 5, 2],
                &[1, 2, 1, 1, 2, 6],
            ],
            &[
                &[2, 2, 1, 2, 2, 2],
                &[2, 2, 2, 2, 2, 2],
                &[1, 2, 3, 4, 2, 1],
                &[2, 2, 4, 2, 2, 2],
                &[2, 2, 2, 2, 2, 2],
                &[2, 2, 1, 2, 2, 5],
            ],
        ),
        other => return Err(UnknownAlgebra(other.to_string())),
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &FiniteAiSemiring, f: fn(&FiniteAiSemiring, usize, usize) -> usize, a: &str, b: &str) -> String {
        let r = f(s, s.index_of(a).unwrap(), s.index_of(b).unwrap());
        s.label(r).to_string()
    }

    #[test]
    fn printed_entries() {
        let s7 = registry("S7").unwrap();
        assert_eq!(op(&s7, FiniteAiSemiring::mul, "a", "1"), "a");
        assert_eq!(op(&s7, FiniteAiSemiring::add, "a", "1"), "0");
        let s = registry("S4_124").unwrap();
        assert_eq!(op(&s, FiniteAiSemiring::mul, "4", "4"), "2");
        assert_eq!(op(&s, FiniteAiSemiring::add, "2", "3"), "2");
        let s = registry("S4_359").unwrap();
        assert_eq!(op(&s, FiniteAiSemiring::mul, "1", "1"), "2");
        assert_eq!(op(&s, FiniteAiSemiring::mul, "3", "4"), "4");
    }

    #[test]
    fn unknown_name() {
        assert!(registry("S8").is_err());
    }
}
