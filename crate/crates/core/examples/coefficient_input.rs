//! Rootfinding from a coefficient file, including complex coefficients.

use chebqr::chebtech::{read_coefficients, Coefficients};
use chebqr::zeros::{zeros_of_series, ZerosOptions};

fn main() {
    let dir = std::env::temp_dir().join(format!("chebqr-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    // T_3(x) - 0.5 T_1(x): one value per line, lowest degree first.
    let real = dir.join("real.txt");
    std::fs::write(&real, "# c_0 .. c_3\n0\n-0.5\n0\n1\n").unwrap();
    // (x - 0.25)(x - 0.5i) = T_2/2 - (0.25 + 0.5i) T_1 + (0.5 + 0.125i) T_0
    let complex = dir.join("complex.txt");
    std::fs::write(&complex, "0.5 0.125\n-0.25 -0.5\n0.5 0\n").unwrap();

    let opts = ZerosOptions { all_eigenvalues: true, ..Default::default() };
    for path in [&real, &complex] {
        let c = read_coefficients(path).unwrap();
        let kind = match c {
            Coefficients::Real(_) => "real",
            Coefficients::Complex(_) => "complex",
        };
        let r = zeros_of_series(&c, &opts).unwrap();
        println!("{kind} coefficients, degree {}", r.degree);
        println!("  real roots: {:?}", r.real_roots);
        println!("  all eigenvalues: {:?}", r.all_eigenvalues.unwrap());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
