fn main() {
    println!("ttek placeholder");
}
