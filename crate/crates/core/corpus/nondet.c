int next_id(int base)
{
    static int counter;
    counter++;
    return base + counter;
}
