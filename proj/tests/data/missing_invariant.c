int main()
  //@ requires true;
  //@ ensures true;
{
  int x = 0;
  while (x < 3) {
    x = x + 1;
  }
  return x;
}
