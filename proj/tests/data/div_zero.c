int main()
  //@ requires true;
  //@ ensures true;
{
  return 5 / 0;
}
