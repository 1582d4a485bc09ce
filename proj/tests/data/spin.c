int main()
  //@ requires true;
  //@ ensures true;
{
  int x = 0;
  while (true)
    //@ invariant true;
  {
    x = x + 1;
  }
  return x;
}
