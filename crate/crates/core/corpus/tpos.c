#include "corpus.h"

flag T_POS_IsConstraintValid(T_POS *pVal, int *pErrCode)
{
    flag ret = 1;
    int i;
    switch (pVal->kind) {
    case longitude_PRESENT:
        ret = (-180.0f <= pVal->u.longitude && pVal->u.longitude <= 180.0f);
        *pErrCode = ret ? 0 : 1;
        break;
    case latitude_PRESENT:
        ret = (-90.0f <= pVal->u.latitude && pVal->u.latitude <= 90.0f);
        *pErrCode = ret ? 0 : 2;
        break;
    case height_PRESENT:
        ret = (pVal->u.height >= 0.0f && pVal->u.height <= 10000.0f);
        *pErrCode = ret ? 0 : 3;
        break;
    case anInt_PRESENT:
        ret = (pVal->u.anInt >= 0 && pVal->u.anInt <= 255);
        *pErrCode = ret ? 0 : 4;
        break;
    case label_PRESENT:
        ret = (pVal->u.label.nCount >= 1 && pVal->u.label.nCount <= 20);
        *pErrCode = ret ? 0 : 5;
        break;
    case intArray_PRESENT:
        ret = (pVal->u.intArray.nCount >= 0 && pVal->u.intArray.nCount <= 4);
        for (i = 0; ret && i < pVal->u.intArray.nCount; i++)
            ret = pVal->u.intArray.arr[i] >= 0;
        *pErrCode = ret ? 0 : 6;
        break;
    case myIntSet_PRESENT:
        ret = (pVal->u.myIntSet.a <= pVal->u.myIntSet.b);
        *pErrCode = ret ? 0 : 7;
        break;
    case myIntSetOf_PRESENT:
        ret = (pVal->u.myIntSetOf.nCount >= 0 && pVal->u.myIntSetOf.nCount <= 10);
        *pErrCode = ret ? 0 : 8;
        break;
    case subTypeArray_PRESENT:
        ret = (pVal->u.subTypeArray.nCount >= 1 && pVal->u.subTypeArray.nCount <= 2012);
        *pErrCode = ret ? 0 : 9;
        break;
    default:
        ret = 0;
        *pErrCode = 10;
    }
    return ret;
}
