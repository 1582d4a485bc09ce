int main(int a, int b)
  //@ requires 0 <= a && a <= 1000 && 0 <= b && b <= 1000;
  //@ ensures 0 <= result && result <= 100;
{
  int s = (a + b) / 2;
  if (100 < s) {
    s = 100;
  } else {
    ;
  }
  return s;
}
