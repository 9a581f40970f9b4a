pub mod dilation;
pub mod operator;
pub mod random;
pub mod ncprob;
pub mod free_product;
pub mod harness;
