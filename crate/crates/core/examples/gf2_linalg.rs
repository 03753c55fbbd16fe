//! Dense and sparse GF(2) matrices: rank, kernels, products, quotients.

use twistcube::f2linalg::{self, F2Matrix, SparseMatrix, Subspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = F2Matrix::from_bitstrings(4, &["1100", "0110", "0011", "1001"])?;
    println!("A =\n{a:?}");
    println!("rank {}", a.rank());

    let ker = a.kernel_basis();
    for v in ker.basis_vectors() {
        println!("kernel vector {}", f2linalg::bits_to_string(v, a.cols()));
    }
    println!("A^2 =\n{:?}", a.matmul(&a)?);

    let image = a.image_basis();
    println!("cokernel dimension {}", f2linalg::quotient_dim(&Subspace::full(4), &image)?);
    println!("ker A inside im A? {}", ker.is_subspace_of(&image));

    let s = SparseMatrix::from_columns(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]])?;
    println!("sparse {:?} with {} entries, rank {}", s.shape(), s.nnz(), s.rank());
    println!("as dense =\n{:?}", s.to_dense());
    Ok(())
}
