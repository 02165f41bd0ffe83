pub mod linalg;
pub mod lp;
pub mod optim;
pub mod quad;
pub mod sampling;
