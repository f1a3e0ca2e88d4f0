use pyo3::prelude::*;
use pyo3::types::PyDict;

const REISNER: [[usize; 3]; 10] = [
    [1, 2, 3],
    [1, 2, 4],
    [1, 3, 5],
    [1, 4, 6],
    [1, 5, 6],
    [2, 3, 6],
    [2, 5, 6],
    [2, 4, 5],
    [3, 4, 5],
    [3, 4, 6],
];

fn reisner() -> Vec<Vec<u64>> {
    REISNER
        .iter()
        .map(|g| (1..=6).map(|i| u64::from(g.contains(&i))).collect())
        .collect()
}

#[test]
fn calls_through_the_interpreter() {
    Python::initialize();
    Python::attach(|py| {
        assert_eq!(gradedlc_py::bad_primes(6, reisner()).unwrap(), vec![2]);
        assert_eq!(
            gradedlc_py::support_of(6, reisner(), 4).unwrap(),
            vec!["(2, x1, x2, x3, x4, x5, x6)"]
        );

        let h = gradedlc_py::local_cohomology(py, 3, vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let h2 = h.get_item(2).unwrap().unwrap();
        assert_eq!(h2.cast::<PyDict>().unwrap().len(), 4);

        let t = gradedlc_py::lyubeznik(py, 6, reisner(), 2, true).unwrap();
        let agreement = t.get_item("agreement").unwrap();
        assert!(!agreement
            .get_item("quotient_agrees")
            .unwrap()
            .extract::<bool>()
            .unwrap());

        let c = gradedlc_py::verify_counterexample(py, 2).unwrap();
        assert!(c.get_item("all_passed").unwrap().extract::<bool>().unwrap());

        assert!(gradedlc_py::bad_primes(2, vec![vec![1]]).is_err());
    });
}
