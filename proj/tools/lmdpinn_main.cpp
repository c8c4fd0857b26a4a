// Temporary stub so the tree builds while the library grows; replaced by the
// full CLI once the runner module lands.
int main() { return 0; }
