pub mod enclosure;
pub mod nrlimit;
pub mod scan;
pub mod selftest;
