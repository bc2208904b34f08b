#ifndef CORPUS_H
#define CORPUS_H

typedef int flag;
typedef float asn1Real;
typedef int My2ndInt;

typedef enum {
    T_POS_NONE,
    longitude_PRESENT,
    latitude_PRESENT,
    height_PRESENT,
    subTypeArray_PRESENT,
    label_PRESENT,
    intArray_PRESENT,
    myIntSet_PRESENT,
    myIntSetOf_PRESENT,
    anInt_PRESENT
} T_POS_selection;

typedef struct { int nCount; char arr[20]; } T_POS_label;
typedef struct { int nCount; int arr[4]; } T_ARR;
typedef struct { int a; int b; } T_SET;
typedef struct { int nCount; int arr[10]; } T_SETOF;
typedef struct { int nCount; int arr[2012]; } T_POS_subTypeArray;

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

#endif
