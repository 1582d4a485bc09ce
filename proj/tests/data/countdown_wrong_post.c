int main()
  //@ requires true;
  //@ ensures result == 1;
{
  int x = 32767;
  while (0 < x)
    //@ invariant 0 <= x;
  {
    x = x - 1;
  }
  return x;
}
