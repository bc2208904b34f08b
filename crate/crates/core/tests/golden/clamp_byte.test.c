/* generated driver for clamp_byte */
#include "motif_runtime.h"

typedef int flag;
typedef float asn1Real;
typedef int My2ndInt;
typedef enum {
    T_POS_NONE = 0,
    longitude_PRESENT = 1,
    latitude_PRESENT = 2,
    height_PRESENT = 3,
    subTypeArray_PRESENT = 4,
    label_PRESENT = 5,
    intArray_PRESENT = 6,
    myIntSet_PRESENT = 7,
    myIntSetOf_PRESENT = 8,
    anInt_PRESENT = 9
} T_POS_selection;
typedef struct {
    int nCount;
    char arr[20];
} T_POS_label;
typedef struct {
    int nCount;
    int arr[4];
} T_ARR;
typedef struct {
    int a;
    int b;
} T_SET;
typedef struct {
    int nCount;
    int arr[10];
} T_SETOF;
typedef struct {
    int nCount;
    int arr[2012];
} T_POS_subTypeArray;
typedef struct {
    T_POS_selection kind;
    union {
        asn1Real longitude;
        asn1Real latitude;
        asn1Real height;
        My2ndInt anInt;
        T_POS_label label;
        T_ARR intArray;
        T_SET myIntSet;
        T_SETOF myIntSetOf;
        T_POS_subTypeArray subTypeArray;
    } u;
} T_POS;

int clamp_byte(signed char x);

int main(int argc, char **argv)
{
    signed char origin_x;
    int origin_return;

    load_file(argc > 1 ? argv[1] : NULL, sizeof(origin_x));

    get_value(&origin_x, sizeof(origin_x));
    motif_checkpoint("CALL_ORIG");
    origin_return = clamp_byte(origin_x);
    motif_checkpoint("RET_ORIG");

    printf("x (signed char) = %lld\n", (long long)origin_x);
    printf("return (int) = %lld\n", (long long)origin_return);
    return 0;
}
