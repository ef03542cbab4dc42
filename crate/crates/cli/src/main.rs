fn main() {
    println!("{}", newsdesk_core::placeholder());
}
